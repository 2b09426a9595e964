import os.path

import tkcore

__all__ = ["test_data_dir"]

test_data_dir = os.path.join(os.path.dirname(tkcore.__file__), "tests", "data")
