# Version information follows Semantic Versioning 2.0.0 (https://semver.org/)
# Job files may carry a "format" field; it is compared against this release.
VERSION_MAJOR = 0
VERSION_MINOR = 4
VERSION_PATCH = 0

# Additional version qualifiers
VERSION_QUALIFIER = ''  # Could be 'alpha', 'beta', 'rc', or ''


def get_version():
    """
    Generate a full version string.

    Returns:
        str: Formatted version string
    """
    version_str = f'{VERSION_MAJOR}.{VERSION_MINOR}.{VERSION_PATCH}'
    if VERSION_QUALIFIER:
        version_str += f'-{VERSION_QUALIFIER}'
    return version_str


def get_version_info():
    """Version parts as a dictionary, as embedded in error details."""
    return {
        'major': VERSION_MAJOR,
        'minor': VERSION_MINOR,
        'patch': VERSION_PATCH,
        'qualifier': VERSION_QUALIFIER,
        'full_version': get_version()
    }


def parse_version(text):
    """
    Split 'X.Y.Z[-qualifier]' into a tuple of three integers.

    Missing parts count as zero, so '1' and '1.0' both mean 1.0.0.

    Raises:
        ValueError: if a part is not an integer or there are more than three
    """
    parts = str(text).strip().split('-')[0].split('.')
    if not parts[0] or len(parts) > 3:
        raise ValueError(f"not a version string: {text!r}")
    numbers = [int(part) for part in parts]
    return tuple(numbers + [0] * (3 - len(numbers)))


def check_version_compatibility(min_version):
    """
    Check if the current release is at least ``min_version``.

    Args:
        min_version (str): Minimum version to compare against

    Returns:
        bool: True if current version is compatible, False otherwise

    Raises:
        ValueError: if ``min_version`` is malformed
    """
    return (VERSION_MAJOR, VERSION_MINOR, VERSION_PATCH) >= parse_version(min_version)


__version__ = get_version()
