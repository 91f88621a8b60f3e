"""Self-contained HTML pages for JSON-configured visualization libraries.

Each page loads its library from a pinned CDN URL (see ``cdn.json``),
embeds the configuration as strict JSON in a ``<script type="application/json">``
element and boots the library with a short static script.
"""

from __future__ import annotations

import html
import json
import re
import warnings
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .relaxed_json import loads_strict, to_strict

__all__ = [
    "FRAMEWORKS",
    "SchemaError",
    "SideOutput",
    "cdn_manifest",
    "emit_html",
    "emit_json",
    "extract_config",
    "validate_config",
]


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class SideOutput:
    name: str
    kind: str  # json | html | text
    data: bytes

    @property
    def text(self) -> str:
        return self.data.decode("utf-8")


@lru_cache(maxsize=1)
def cdn_manifest() -> dict:
    return json.loads(resources.files(__package__).joinpath("cdn.json").read_text("utf-8"))


# ----------------------------------------------------------------- schemas

def _require(config: dict, key: str, kind: type, path: str = "$"):
    if key not in config:
        raise SchemaError(f"{path}.{key}", "missing mandatory member")
    value = config[key]
    if not isinstance(value, kind):
        expected = "an array" if kind is list else "an object" if kind is dict else "a string"
        raise SchemaError(f"{path}.{key}", f"must be {expected}")
    return value


def _optional(config: dict, key: str, kind: type, path: str = "$"):
    if key in config:
        return _require(config, key, kind, path)
    return None


def _check_tabulator(config: dict) -> None:
    _require(config, "data", list)
    _require(config, "columns", list)
    downloads = _optional(config, "download", list)
    for i, entry in enumerate(downloads or ()):
        path = f"$.download[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "must be an object")
        _require(entry, "format", str, path)
        _optional(entry, "options", dict, path)


def _check_chartjs(config: dict) -> None:
    _require(config, "type", str)
    _require(config, "data", dict)


def _check_vis_network(config: dict) -> None:
    data = _require(config, "data", dict)
    _require(data, "nodes", list, "$.data")
    _optional(data, "edges", list, "$.data")


def _check_vis_timeline(config: dict) -> None:
    _require(config, "items", list)
    _optional(config, "groups", list)


def _check_vis_graph3d(config: dict) -> None:
    _require(config, "data", list)


def _check_apexcharts(config: dict) -> None:
    _require(config, "chart", dict)
    _require(config, "series", list)


def _check_fabricjs(config: dict) -> None:
    _require(config, "objects", list)


_CHECKS = {
    "tabulator": _check_tabulator,
    "chartjs": _check_chartjs,
    "vis-network": _check_vis_network,
    "vis-timeline": _check_vis_timeline,
    "vis-graph3d": _check_vis_graph3d,
    "apexcharts": _check_apexcharts,
    "fabricjs": _check_fabricjs,
}

FRAMEWORKS = tuple(_CHECKS)


def validate_config(framework: str, config):
    """Shallow structural checks; anything not checked passes through untouched."""
    if framework not in _CHECKS:
        raise ValueError(f"unknown framework {framework!r}; expected one of {', '.join(FRAMEWORKS)}")
    if not isinstance(config, dict):
        raise SchemaError("$", "configuration must be an object")
    _CHECKS[framework](config)
    return config


# ------------------------------------------------------------ boot scripts

_PRELUDE = 'const config = JSON.parse(document.getElementById("config").textContent);\n'

_BOOT = {
    "tabulator": """\
const { download, ...options } = config;
const table = new Tabulator("#main", options);
document.querySelectorAll("[data-download]").forEach((button) => {
  const entry = download[Number(button.dataset.download)];
  const name = entry.filename || "data." + entry.format;
  button.addEventListener("click", () => table.download(entry.format, name, entry.options || {}));
});
""",
    "chartjs": """\
new Chart(document.getElementById("main"), config);
""",
    "vis-network": """\
const data = {
  nodes: new vis.DataSet(config.data.nodes),
  edges: new vis.DataSet(config.data.edges || []),
};
new vis.Network(document.getElementById("main"), data, config.options || {});
""",
    "vis-timeline": """\
const container = document.getElementById("main");
const items = new vis.DataSet(config.items);
if (config.groups) {
  new vis.Timeline(container, items, new vis.DataSet(config.groups), config.options || {});
} else {
  new vis.Timeline(container, items, config.options || {});
}
""",
    "vis-graph3d": """\
new vis.Graph3d(document.getElementById("main"), new vis.DataSet(config.data), config.options || {});
""",
    "apexcharts": """\
new ApexCharts(document.getElementById("main"), config).render();
""",
    "fabricjs": """\
const canvas = new fabric.Canvas("main", { width: config.width || 800, height: config.height || 600 });
canvas.loadFromJSON(config, canvas.renderAll.bind(canvas));
""",
}

_CANVAS = {"chartjs", "fabricjs"}


def _embed(config) -> str:
    # "</" would end the script element early; "<\/" is the same JSON string.
    return to_strict(config).replace("</", "<\\/")


_CONFIG = re.compile(r'<script type="application/json" id="config">(.*?)</script>', re.S)


def extract_config(page: str) -> str:
    """The strict JSON text embedded in a page produced by emit_html."""
    m = _CONFIG.search(page)
    if not m:
        raise ValueError("no embedded configuration")
    return m.group(1).replace("<\\/", "</")


def _download_buttons(config: dict) -> str:
    buttons = []
    for i, entry in enumerate(config.get("download") or ()):
        color = html.escape(str(entry.get("color", "primary")), quote=True)
        label = html.escape(str(entry.get("label", entry["format"].upper())))
        buttons.append(f'<button type="button" class="btn btn-{color} me-2 mb-2" data-download="{i}">{label}</button>')
    if not buttons:
        return ""
    return '<div id="downloads">\n' + "\n".join(buttons) + "\n</div>\n"


def emit_html(framework: str, config, name: str = "", title: str = "", offline: bool = False) -> SideOutput:
    """A single-file HTML page rendering ``config`` with ``framework``."""
    validate_config(framework, config)
    if offline:
        warnings.warn(f"offline mode: the {framework} page still needs the CDN to render", stacklevel=2)
    cdn = cdn_manifest()[framework]
    styles = list(cdn["styles"])
    scripts = list(cdn["scripts"])
    if framework == "tabulator":
        for entry in config.get("download") or ():
            scripts += [u for u in cdn["download"].get(entry["format"], ()) if u not in scripts]
    title = title or framework
    head = [f'<link rel="stylesheet" href="{u}">' for u in styles]
    head += [f'<script src="{u}"></script>' for u in scripts]
    if framework in _CANVAS:
        main = '<canvas id="main"></canvas>'
    else:
        main = '<div id="main" style="height: 600px;"></div>'
    body = _download_buttons(config) if framework == "tabulator" else ""
    page = (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        f"<title>{html.escape(title)}</title>\n"
        + "\n".join(head)
        + "\n</head>\n<body>\n"
        + body
        + main
        + "\n"
        + f'<script type="application/json" id="config">{_embed(config)}</script>\n'
        + "<script>\n"
        + _PRELUDE
        + _BOOT[framework]
        + "</script>\n</body>\n</html>\n"
    )
    return SideOutput(name or f"{framework}.html", "html", page.encode("utf-8"))


def emit_json(config, name: str) -> SideOutput:
    return SideOutput(name, "json", (to_strict(config) + "\n").encode("utf-8"))


def parse_embedded(page: str):
    return loads_strict(extract_config(page))
