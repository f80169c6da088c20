import hashlib
from pathlib import Path


def is_non_empty_str(s):
	if not (isinstance(s, str)):
		return False
	if not s.strip():
		return False
	return True


def blob_hash(data):
	"""Git-style object hash of `data`: sha1 over b"blob <len>\\0" + data."""
	digest = hashlib.sha1()
	digest.update(f"blob {len(data)}\0".encode("ascii"))
	digest.update(data)
	return digest.hexdigest()


def file_hash(path):
	return blob_hash(Path(path).read_bytes())


def tree_hash(paths):
	"""Hash of a set of files (or directories, walked recursively) by relative name and content.

	Names are taken relative to each given root so moving a dataset
	directory does not change its hash.
	"""
	entries = []
	for root in sorted(Path(p) for p in paths):
		files = sorted(f for f in root.rglob("*") if f.is_file()) if root.is_dir() else [root]
		for f in files:
			name = f.relative_to(root).as_posix() if root.is_dir() else f.name
			entries.append(f"{file_hash(f)} {name}")
	return blob_hash("\n".join(entries).encode("utf-8"))
