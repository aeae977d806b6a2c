"""Two-layer shallow water solver with adaptive mesh refinement."""

from pathlib import Path

from ._mlamr import (
    Config,
    ConfigError,
    FrameError,
    GeometryError,
    Simulation,
    compare_l1,
    depths_from_surfaces,
    format_report,
    load_config,
    minmod,
    parse_config,
    read_frame,
    read_stats,
    surfaces_from_depths,
)

__all__ = [
    "Config",
    "ConfigError",
    "FrameError",
    "GeometryError",
    "Simulation",
    "compare_l1",
    "depths_from_surfaces",
    "format_report",
    "load_config",
    "minmod",
    "parse_config",
    "read_frame",
    "read_stats",
    "run",
    "surface",
]


def run(config, out_dir=None):
    """Runs a configuration (path or Config) to its final time, writing a frame
    at every frame time when ``out_dir`` is given. Returns the run statistics."""
    if not isinstance(config, Config):
        config = load_config(str(config))
    if not config.amr:
        config = config.uniform_equivalent()
    sim = Simulation(config)
    sim.initialize()
    if out_dir is None:
        return sim.run()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    count = 0

    def on_frame(t):
        nonlocal count
        sim.write_frame(str(out / f"frame_{count:04d}.frame"), time=t)
        count += 1

    return sim.run(on_frame)


def surface(values, layer=0):
    """Surface elevation of ``layer`` from an array of frame cells (last axis
    holds B, then h, hu, hv per layer, top layer first)."""
    num_layers = (values.shape[-1] - 1) // 3
    eta = values[..., 0].copy()
    for m in range(layer, num_layers):
        eta += values[..., 1 + 3 * m]
    return eta
