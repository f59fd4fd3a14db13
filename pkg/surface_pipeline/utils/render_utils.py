import io
import logging
from math import ceil, floor

import matplotlib
matplotlib.use("Agg")
from matplotlib.figure import Figure
from matplotlib.patches import Polygon as PolygonPatch

from utils.polygon_utils import PolygonChain, Shape, lattice_points

logger = logging.getLogger("RenderUtils")

PIXELS_PER_UNIT = 32
DPI = 72
MARGIN = 1
COLORMAP = "Blues"


def member_color(depth: int, count: int):
    """Shade of the single chain hue, darker for deeper members."""
    return matplotlib.colormaps[COLORMAP](0.4 + 0.6 * depth / max(1, count - 1))


def render_chain_svg(chain: PolygonChain) -> str:
    """SVG of the chain members, outermost first, over the lattice points of the input."""
    outer = chain.members[0]
    xs = [float(v[0]) for v in outer.vertices]
    ys = [float(v[1]) for v in outer.vertices]
    x_lo, x_hi = floor(min(xs)) - MARGIN, ceil(max(xs)) + MARGIN
    y_lo, y_hi = floor(min(ys)) - MARGIN, ceil(max(ys)) + MARGIN
    width, height = x_hi - x_lo, y_hi - y_lo

    fig = Figure(figsize=(width * PIXELS_PER_UNIT / DPI, height * PIXELS_PER_UNIT / DPI), dpi=DPI)
    ax = fig.add_axes([0, 0, 1, 1])
    ax.set_xlim(x_lo, x_hi)
    ax.set_ylim(y_lo, y_hi)
    ax.set_aspect("equal")
    ax.axis("off")

    grid = lattice_points(outer)
    ax.scatter([p[0] for p in grid], [p[1] for p in grid], s=6, color="#555555", zorder=3)

    for i, member in enumerate(chain.members):
        color = member_color(i, len(chain.members))
        pts = [(float(x), float(y)) for x, y in member.vertices]
        if member.shape == Shape.TWO_DIMENSIONAL:
            ax.add_patch(PolygonPatch(pts, closed=True, fill=True, alpha=0.25,
                                      facecolor=color, edgecolor=color, linewidth=1.5))
        elif member.shape == Shape.SEGMENT:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], color=color, linewidth=2.5)
        elif member.shape == Shape.POINT:
            ax.scatter([pts[0][0]], [pts[0][1]], s=40, color=color, zorder=4)

    buf = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": "adjoint-keel", "svg.fonttype": "none"}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    logger.debug(f"🔎 Rendered {len(chain.members)} chain members at {PIXELS_PER_UNIT}px per unit")
    return buf.getvalue().decode("utf-8")
