"""Services package: exact arithmetic, annihilator search and reconstruction."""
