"""Exception types shared across the package."""


class ParseError(ValueError):
    """A world, pattern, corpus, or prediction file is syntactically malformed."""


class ValidationError(ValueError):
    """An input is well-formed but violates a semantic constraint.

    Messages always name the offending element (entity, class, pattern id,
    line number, ...) so that failures in CI logs are actionable.
    """
