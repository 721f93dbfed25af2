"""LLM-guided generation of unusual text inputs for mobile GUI pages.

The pipeline asks a language model for a valid input, then for small
mutation programs whose outputs are submitted to the app until it crashes.
Apps are modelled by declarative specs run in a simulator.
"""

from .campaign import CampaignConfig, CampaignReport, TargetReport, run_suite, run_target
from .dsl import execute_program, parse_program, pretty_print
from .hierarchy import diff_pages, extract_widget_context, identify_input_widgets, parse_hierarchy
from .llm import LiveProvider, MockProvider
from .model import CATALOG, GuiPage, InputWidget, ViewNode, WidgetContext
from .simulator import AppSpec, Simulator, load_app_spec, load_spec_dir
from .store import ExampleStore, load_seed_dataset

__version__ = "0.1.0"

__all__ = [
    "AppSpec",
    "CATALOG",
    "CampaignConfig",
    "CampaignReport",
    "ExampleStore",
    "GuiPage",
    "InputWidget",
    "LiveProvider",
    "MockProvider",
    "Simulator",
    "TargetReport",
    "ViewNode",
    "WidgetContext",
    "diff_pages",
    "execute_program",
    "extract_widget_context",
    "identify_input_widgets",
    "load_app_spec",
    "load_seed_dataset",
    "load_spec_dir",
    "parse_hierarchy",
    "parse_program",
    "pretty_print",
    "run_suite",
    "run_target",
]
