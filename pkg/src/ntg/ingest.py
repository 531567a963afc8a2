"""OpenStreetMap ingestion and dataset assembly.

Extracts highway-tagged ways from OSM XML, projects them to local meters
with an equirectangular projection about the extract's bbox center, merges
near-coincident nodes, and keeps the largest connected component. Datasets
bundle named graphs with style ids and seeded 4-1-1 split assignments.
"""

from __future__ import annotations

import hashlib
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .geometry import equirectangular
from .graph import MAJOR, MINOR, GraphError, RoadGraph

MAJOR_HIGHWAYS = frozenset({"motorway", "trunk", "primary", "secondary"})


class OsmError(ValueError):
    pass


def parse_osm(xml_text: str | bytes, edge_types: bool = False) -> RoadGraph:
    """OSM XML -> metric road graph (largest connected component).

    Every way vertex becomes a graph node, so shared vertices join ways at
    intersections. With edge_types on, motorway/trunk/primary/secondary map
    to "major", everything else to "minor".
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise OsmError(f"malformed OSM XML at line {line}, column {col}") from exc

    latlon: dict[str, tuple[float, float]] = {}
    for node in root.iter("node"):
        latlon[node.attrib["id"]] = (
            float(node.attrib["lat"]),
            float(node.attrib["lon"]),
        )

    ways: list[tuple[list[str], str]] = []
    for way in root.iter("way"):
        tags = {
            tag.attrib["k"]: tag.attrib["v"]
            for tag in way
            if tag.tag == "tag"
        }
        highway = tags.get("highway")
        if highway is None:
            continue
        refs = [nd.attrib["ref"] for nd in way if nd.tag == "nd"]
        refs = [r for r in refs if r in latlon]
        if len(refs) >= 2:
            ways.append((refs, highway))
    if not ways:
        raise OsmError("empty road set: no highway-tagged ways")

    used = {r for refs, _ in ways for r in refs}
    lats = [latlon[r][0] for r in used]
    lons = [latlon[r][1] for r in used]
    lat0 = (min(lats) + max(lats)) / 2.0
    lon0 = (min(lons) + max(lons)) / 2.0

    graph = RoadGraph()
    if edge_types:
        graph.edge_type = {}
    osm_to_node: dict[str, int] = {}
    for refs, highway in ways:
        kind = (MAJOR if highway in MAJOR_HIGHWAYS else MINOR) if edge_types else None
        prev = None
        for ref in refs:
            if ref in osm_to_node:
                cur = osm_to_node[ref]
            else:
                lat, lon = latlon[ref]
                x, y = equirectangular(lat, lon, lat0, lon0)
                cur = graph.add_or_merge_node(x, y)
                osm_to_node[ref] = cur
            if prev is not None and prev != cur:
                graph.add_edge(prev, cur, kind)
            prev = cur

    result = graph.largest_component()
    if not result.nodes:
        raise OsmError("empty road set after filtering")
    result.provenance = {"projection_center": (lat0, lon0)}  # type: ignore[attr-defined]
    return result


# -- dataset manifest -----------------------------------------------------------


SPLITS = ("train", "val", "test")


def assign_split(name: str, seed: int) -> str:
    """Seeded 4-1-1 train/val/test assignment by hashing the tile name."""
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    bucket = int.from_bytes(digest[:4], "little") % 6
    return "train" if bucket < 4 else ("val" if bucket == 4 else "test")


@dataclass
class DatasetEntry:
    name: str
    graph_file: str
    style: int
    split: str
    source: str = ""
    projection_center: tuple[float, float] | None = None


@dataclass
class Dataset:
    entries: list[DatasetEntry] = field(default_factory=list)

    def add(self, entry: DatasetEntry) -> None:
        if any(e.name == entry.name for e in self.entries):
            raise GraphError(f"dataset already has an entry named {entry.name!r}")
        if entry.split not in SPLITS:
            raise GraphError(f"unknown split {entry.split!r}")
        self.entries.append(entry)

    def split(self, which: str) -> list[DatasetEntry]:
        return [e for e in self.entries if e.split == which]

    def to_json(self) -> str:
        return json.dumps(
            {
                "entries": [
                    {
                        "name": e.name,
                        "graph_file": e.graph_file,
                        "style": e.style,
                        "split": e.split,
                        "source": e.source,
                        "projection_center": list(e.projection_center)
                        if e.projection_center
                        else None,
                    }
                    for e in self.entries
                ]
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        doc = json.loads(text)
        ds = cls()
        for e in doc.get("entries", []):
            center = e.get("projection_center")
            ds.add(
                DatasetEntry(
                    name=e["name"],
                    graph_file=e["graph_file"],
                    style=int(e["style"]),
                    split=e["split"],
                    source=e.get("source", ""),
                    projection_center=tuple(center) if center else None,
                )
            )
        return ds

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path: str) -> "Dataset":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())
