from codense.cli import entry

entry()
