import csv
import io
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from chambers.services.decomposition_service import sign_vector
from chambers.types import Chamber
from lattice.types import CurveClass
from walls.types import Wall

logger = logging.getLogger(__name__)

OUTSIDE = -1


@dataclass(frozen=True)
class SlicePlane:
    """origin + x.u + y.v for x, y in [0, 1]."""

    origin: CurveClass
    u: CurveClass
    v: CurveClass


@dataclass(frozen=True)
class SliceExport:
    filename: str
    content: str
    grid: int


class SliceService:
    """
    Raster of chamber ids over a 2D affine slice of N_1, for external plotting.

    Cell ids index the chamber list; points whose sign vector is not realized
    inside the region get -1.
    """

    def __init__(self, walls: Sequence[Wall], chambers: Sequence[Chamber]):
        self.walls = tuple(walls)
        self.ids = {chamber.signs: index for index, chamber in enumerate(chambers)}

    def cell_id(self, gamma: CurveClass) -> int:
        return self.ids.get(sign_vector(gamma, self.walls), OUTSIDE)

    def raster(self, plane: SlicePlane, grid: int) -> list[list[int]]:
        if grid < 2:
            raise ValueError(f'grid must be at least 2, got {grid}')
        rows = []
        for j in range(grid):
            y = Fraction(j, grid - 1)
            row = []
            for i in range(grid):
                x = Fraction(i, grid - 1)
                row.append(self.cell_id(plane.origin + plane.u.scaled(x) + plane.v.scaled(y)))
            rows.append(row)
        return rows

    def export_csv(self, plane: SlicePlane, grid: int, filename: str = 'slice.csv') -> SliceExport:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        for row in self.raster(plane, grid):
            writer.writerow(row)
        logger.debug('slice %s: %dx%d raster', filename, grid, grid)
        return SliceExport(filename=filename, content=buffer.getvalue(), grid=grid)
