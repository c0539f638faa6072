"""Output files and number formatting"""
import logging
import os
from fractions import Fraction
from pathlib import Path

logger = logging.getLogger(__name__)

DECIMAL_PLACES = 12


def write_file(file_path, content):
    """Write content to file with immediate flush"""
    file_path = Path(file_path)
    try:
        logger.debug(f"Writing file: {file_path}")
        if file_path.parent and not file_path.parent.exists():
            file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
            f.flush()
            os.fsync(f.fileno())
        logger.info(f"Wrote {file_path}")
    except (IOError, PermissionError) as e:
        logger.error(f"Failed to write file {file_path}: {e}")
        raise


def format_rational(value) -> str:
    """Exact 'p/q' (or integer) rendering"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value, places: int = DECIMAL_PLACES) -> str:
    """Fixed-point rendering rounded half-even from the exact value"""
    value = Fraction(value)
    scale = 10 ** places
    scaled = round(value * scale)
    sign = '-' if scaled < 0 else ''
    scaled = abs(scaled)
    return f"{sign}{scaled // scale}.{scaled % scale:0{places}d}"


def format_float(value: float, places: int = DECIMAL_PLACES) -> str:
    text = f"{value:.{places}f}"
    if text.startswith('-') and float(text) == 0:
        text = text[1:]
    return text
