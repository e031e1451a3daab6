"""Enable running as: python -m sqc_lab"""

from sqc_lab.main import main

if __name__ == "__main__":
    main()
