"""Main entry point for the command-line toolkit"""
import sys

from src.cli.main import main

# Run with: python main.py <command> --help
if __name__ == "__main__":
    sys.exit(main())
