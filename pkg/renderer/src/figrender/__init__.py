"""Figure renderer for jcdephase CSV output; no physics is recomputed here."""

__version__ = "0.1.0"
