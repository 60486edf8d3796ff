"""
HTTP routers: the session runner.
"""
