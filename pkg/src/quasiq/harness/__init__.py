"""Verifier DSL, problem-spec ingestion, and the command-line harness."""
