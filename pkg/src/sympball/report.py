"""
Text rendering of command results through jinja2 templates.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import jinja2

from .utils import format_sequence

logger = logging.getLogger("sympball.report")

TEMPLATE_DIR = Path(__file__).parent / "templates"


def _format_number(value: Any, precision: int = 10) -> str:
    if value is None:
        return "-"
    return f"{float(value):.{precision}g}"


class TextReporter:
    """Renders result documents with the bundled ``*.txt.j2`` templates."""

    def __init__(self, template_dir: Optional[Path] = None):
        self.template_dir = Path(template_dir or TEMPLATE_DIR)
        self.env = jinja2.Environment(
            loader=jinja2.FileSystemLoader(str(self.template_dir)),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        self.env.filters["seq"] = format_sequence
        self.env.filters["num"] = _format_number

    def render(self, name: str, data: Dict[str, Any]) -> str:
        """
        Render ``<name>.txt.j2`` with the given document.

        Raises:
            jinja2.TemplateError: If the template is missing or fails.
        """
        template = self.env.get_template(f"{name}.txt.j2")
        text = template.render(**data)
        logger.debug(f"Rendered {name} report ({len(text)} chars)")
        return text
