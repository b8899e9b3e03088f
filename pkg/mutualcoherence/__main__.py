"""Package entrypoint."""
import sys

if __name__ == "__main__":
    from mutualcoherence.main import main

    sys.exit(main())
