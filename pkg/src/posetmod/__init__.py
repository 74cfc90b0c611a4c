"""Structure theory of modules over finite posets, in exact arithmetic."""
