from app.exceptions import InputError


class MissingFile(InputError):
    pass


class MalformedLine(InputError):
    def __init__(self, message: str, line_no: int | None = None, path=None) -> None:
        self.message = message
        self.line_no = line_no
        self.path = path
        super().__init__(message, line_no, path)

    def __str__(self):
        location = '' if self.path is None else '%s' % self.path
        if self.line_no is not None:
            location = '%s:%d' % (location, self.line_no) if location else 'line %d' % self.line_no
        return '%s: %s' % (location, self.message) if location else self.message


class SelfLoop(MalformedLine):
    pass


class DuplicateEdge(MalformedLine):
    pass


class LabelOutOfRange(InputError):
    pass


class AsymmetryDetected(InputError):
    pass


class MetadataMismatch(InputError):
    pass


class EmptyGraph(InputError):
    pass


class NotEnoughCrossClassPairs(InputError):
    pass
