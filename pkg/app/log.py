import logging
import traceback
from copy import copy

from django.conf import settings
from django.core.mail import EmailMessage


class ExperimentFailureEmailHandler(logging.Handler):
    """A log handler that emails error records to the project developers.

    Long experiment sweeps run unattended, so a diverged seed or a crashed
    worker is reported by email with the traceback appended when the record
    carries exception info.

    Replicated from Django's AdminEmailHandler to use the configured backend
    and the RDSA_DEV_EMAILS recipients.
    """

    def emit(self, record):
        recipients = getattr(settings, 'RDSA_DEV_EMAILS', [])
        if not recipients:
            return

        subject = '%s: %s' % (
            record.levelname,
            record.getMessage()
        )
        subject = subject.replace('\n', '\\n').replace('\r', '\\r')[:200]

        # The traceback is appended on our own, so format a copy of the
        # record without the exception data.
        no_exc_record = copy(record)
        no_exc_record.exc_info = None
        no_exc_record.exc_text = None

        body = self.format(no_exc_record)
        if record.exc_info:
            body = '%s\n\n%s' % (body, ''.join(traceback.format_exception(*record.exc_info)))
        diagnostics = getattr(record, 'diagnostics', None)
        if diagnostics:
            body = '%s\n\nDiagnostics:\n%s' % (body, diagnostics)

        msg = EmailMessage(subject, body, getattr(settings, 'SERVER_EMAIL', ''), recipients)
        msg.send(fail_silently=True)
