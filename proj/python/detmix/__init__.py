# Copyright 2026 The detmix Authors.
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

"""Augmentation, synthetic-data mixing and detection evaluation."""

from ._detmix import (
    BBox,
    Detection,
    Error,
    GroundTruth,
    blend,
    evaluate,
    flip,
    hsv_scale,
    iou,
    load_dataset,
    make_toy_dataset,
    map_at,
    map_range,
    nms,
    plan,
    round_half_up_milli,
    split_sizes,
    synthetic_count,
    trainer_config,
    transform_box,
)

__all__ = [
    "BBox",
    "Detection",
    "Error",
    "GroundTruth",
    "blend",
    "evaluate",
    "flip",
    "hsv_scale",
    "iou",
    "load_dataset",
    "make_toy_dataset",
    "map_at",
    "map_range",
    "nms",
    "plan",
    "round_half_up_milli",
    "split_sizes",
    "synthetic_count",
    "trainer_config",
    "transform_box",
]
