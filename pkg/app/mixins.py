import json
import logging
from contextlib import contextmanager

from django.core.management.base import CommandError

from app.exceptions import InputError, RDSAError


class RDSACommandMixin:
    """
    Shared behaviour of the rdsa management commands: library errors become
    CommandError with the exit code of their family (2 for bad input, 3 for
    divergence; files that cannot be read or written count as bad input) and
    results are written as JSON to stdout or a file.
    """

    @contextmanager
    def reporting_errors(self):
        try:
            yield
        except CommandError:
            raise
        except RDSAError as exc:
            logging.getLogger(self.__module__).debug('Command failed', exc_info=True)
            raise CommandError(str(exc), returncode=getattr(exc, 'exit_code', 1)) from exc
        except ValueError as exc:
            # argument parsing helpers (noise levels, aux modes, ranges) raise ValueError
            raise CommandError(str(exc), returncode=InputError.exit_code) from exc
        except OSError as exc:
            # unreadable inputs and unwritable output paths
            raise CommandError(str(exc), returncode=InputError.exit_code) from exc

    def write_json(self, data, path=None):
        text = json.dumps(data, indent=2, sort_keys=False)
        if path is None or str(path) == '-':
            self.stdout.write(text)
        else:
            with open(path, 'w') as fh:
                fh.write(text + '\n')
            self.stdout.write(self.style.SUCCESS('Wrote %s' % path))
