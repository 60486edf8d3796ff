"""
Session language: parser and command runner.
"""
