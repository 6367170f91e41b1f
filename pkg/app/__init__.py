"""Mail Forensics - forensic text mining of email corpora."""

__version__ = "0.1.0"
