class ValidationError(ValueError):
    """Input CSV or job description violates the rendering contract."""
