"""Allow ``python -m pwextremal`` as an alias for the ``pwx`` script."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
