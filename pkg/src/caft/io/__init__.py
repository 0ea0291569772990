from .canonical import FORMAT_VERSION, dumps, write_json
from .images import decode_png, decode_pnm, encode_png, encode_pnm, load_image, save_image
from .manifest import ManifestEntry, read_manifest, read_probs, write_manifest, write_probs
from .reports import read_partition_report, write_partition_report, write_provenance_log

__all__ = [
    "FORMAT_VERSION",
    "ManifestEntry",
    "decode_png",
    "decode_pnm",
    "dumps",
    "encode_png",
    "encode_pnm",
    "load_image",
    "read_manifest",
    "read_partition_report",
    "read_probs",
    "save_image",
    "write_json",
    "write_manifest",
    "write_partition_report",
    "write_probs",
    "write_provenance_log",
]
