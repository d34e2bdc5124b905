"""
Utility for validating noise-pattern JSON before a replay
"""

import json
import re
from typing import Optional, Tuple

from pydantic import ValidationError

from schemas.noise import NoisePattern


class PatternValidator:
    """Validates pattern files, including hand-edited ones and counterexample lines"""

    @staticmethod
    def validate(json_str: str) -> Tuple[bool, Optional[NoisePattern], Optional[str]]:
        """
        Parse a NoisePattern, or a counterexample record wrapping one
        Returns: (is_valid, pattern, error_message)
        """

        try:
            data = json.loads(json_str)
        except json.JSONDecodeError as e:
            error_msg = f"JSON error at position {e.pos}: {e.msg}"
            try:
                data = json.loads(PatternValidator._clean_json(json_str))
            except json.JSONDecodeError:
                return False, None, error_msg

        if isinstance(data, dict) and isinstance(data.get("pattern"), dict):
            data = data["pattern"]
        if not isinstance(data, dict):
            return False, None, "expected a JSON object"

        try:
            return True, NoisePattern.from_dict(data), None
        except (ValidationError, ValueError, KeyError, TypeError) as e:
            return False, None, f"not a valid noise pattern: {e}"

    @staticmethod
    def fill_name(json_str: str) -> Optional[str]:
        """The fill strategy recorded next to a counterexample, if any"""
        try:
            data = json.loads(json_str)
        except json.JSONDecodeError:
            return None
        return data.get("fill") if isinstance(data, dict) else None

    @staticmethod
    def _clean_json(json_str: str) -> str:
        """Clean common hand-editing issues"""

        # Remove comments
        json_str = re.sub(r'//.*?$', '', json_str, flags=re.MULTILINE)
        json_str = re.sub(r'/\*.*?\*/', '', json_str, flags=re.DOTALL)

        # Fix trailing commas
        json_str = re.sub(r',(\s*[}\]])', r'\1', json_str)

        return json_str
