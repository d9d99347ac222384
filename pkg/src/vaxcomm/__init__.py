"""Community detection and link-credibility profiling for follower networks."""

__version__ = "0.1.0"
