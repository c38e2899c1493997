"""Exact and Monte Carlo computational geometry for the simulation lab."""

from .bodies import (
    Ball,
    Box,
    ComplementBody,
    Component,
    HPolytope,
    Hull,
    SetModel,
    VCompact,
    as_point,
    box,
    chebyshev_center,
    component_bbox,
    convex_distance,
    is_axis_box,
    polytope_vertices_any_dim,
    probe_diameter,
    project_point,
    support,
    support_batch,
)
from .containment import (
    ErosionRegion,
    contains_set,
    contains_set_batch,
    erode,
    eroded_offsets,
    model_contains_points,
    sample_window,
    volume_mc,
    window_volume,
)
from .polygons import (
    cycle_perimeter,
    intrinsic_volumes_2d,
    polygon_vertices,
    shoelace_area,
    unit_ball_volume,
    volume_exact,
)

__all__ = [
    "Ball",
    "Box",
    "ComplementBody",
    "Component",
    "ErosionRegion",
    "HPolytope",
    "Hull",
    "SetModel",
    "VCompact",
    "as_point",
    "box",
    "chebyshev_center",
    "component_bbox",
    "contains_set",
    "contains_set_batch",
    "convex_distance",
    "cycle_perimeter",
    "erode",
    "eroded_offsets",
    "intrinsic_volumes_2d",
    "is_axis_box",
    "model_contains_points",
    "polygon_vertices",
    "polytope_vertices_any_dim",
    "probe_diameter",
    "project_point",
    "sample_window",
    "shoelace_area",
    "support",
    "support_batch",
    "unit_ball_volume",
    "volume_exact",
    "volume_mc",
    "window_volume",
]
