from app.exceptions import InputError, RDSAError


class ModularityMatrixTooLarge(InputError):
    pass


class EmptySubset(InputError):
    pass


class NoModules(InputError):
    pass


class EmptyLandmarks(InputError):
    pass


class DegenerateColumn(RDSAError):
    """A landmark column of the soft assignment carries no mass."""

    def __init__(self, columns):
        self.columns = tuple(int(c) for c in columns)
        super().__init__(self.columns)

    def __str__(self):
        return 'Landmark column(s) %s received no assignment mass' % ', '.join(map(str, self.columns))
