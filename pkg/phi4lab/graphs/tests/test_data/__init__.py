import os

test_path = os.path.dirname(os.path.abspath(__file__))

__all__ = [test_path]
