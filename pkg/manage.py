#!/usr/bin/env python
"""Command-line entry point of the Menger curvature lab and Django's admin tasks."""
import os
import sys


def main():
    """Run a lab command or an administrative task."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')
    from menger.cli import dispatch

    sys.exit(dispatch(sys.argv))


if __name__ == '__main__':
    main()
