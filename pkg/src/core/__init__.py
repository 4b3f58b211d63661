"""Core components: errors, logging and shared domain types."""
