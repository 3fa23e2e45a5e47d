# Copyright 2026 The covox Authors
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

"""Semantic voxel annotation and collaborative perception benchmark."""

from ._core import (
    Agent,
    ConfigError,
    Error,
    GeometryError,
    GridError,
    GridFormatError,
    GridSpec,
    ResourceError,
    RigidTransform,
    Scene,
    VoxelGrid,
    annotate,
    brute_force_annotate,
    brute_force_op_count,
    compute_visibility,
    crop_to_range,
    decode_grid,
    downsample,
    encode_grid,
    evaluate,
    label_code,
    label_name,
    read_grid,
    relative_transform,
    run_benchmark,
    select_collaborators,
    warp_grid,
    write_grid,
)

__version__ = "0.1.0"
