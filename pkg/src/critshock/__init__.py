"""Critical behaviour of viscous transport equations near a gradient catastrophe."""

__version__ = "0.1.0"
