"""HTTP surfaces (echo stub of a chat-completion endpoint)."""
