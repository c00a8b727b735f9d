# Copyright 2026 The gstamp Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Globular-cluster location and time stamps."""

import os as _os

# An installed wheel carries its own copy of the reference snapshot.
_data = _os.path.join(_os.path.dirname(__file__), "data")
if _os.path.isfile(_os.path.join(_data, "reference_snapshot.csv")):
    _os.environ.setdefault("GSTAMP_DATA", _data)

from ._gstamp import *  # noqa: E402,F401,F403
from ._gstamp import GstampError, __version__  # noqa: E402,F401
