__version__ = "0.1.0"


CLI_EXECUTABLE_NAME = "mfpricing"
PACKAGE_NAME = "mf-pricing"
