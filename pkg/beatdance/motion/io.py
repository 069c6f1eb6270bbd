"""
Binary codecs for motion (RDMC) and music feature (RDMF) files, plus the JSON manifest.

RDMC: b"RDMC", u32 version, u32 J, u32 T, u32 fps, u32 style, T*(J*9+3) LE float32.
RDMF: b"RDMF", u32 version, u32 T, u32 fps, u32 style, u8 has_beats, T*32 LE float32,
      then T bytes of beat flags when has_beats is set.
"""

import json
import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from ..core.errors import BadMagic, DimensionMismatch, IoFailure, TruncatedFile
from ..models.motion_model import (
    MUSIC_DIM,
    DatasetManifest,
    MotionClip,
    MusicFeatureTrack,
    pose_width,
)

MOTION_MAGIC = b"RDMC"
MUSIC_MAGIC = b"RDMF"
FORMAT_VERSION = 1

_MOTION_HEADER = struct.Struct("<5I")
_MUSIC_HEADER = struct.Struct("<4IB")


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _write_bytes(path, payload: bytes) -> None:
    if not str(path):
        raise IoFailure("empty output path")
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _check_magic(raw: bytes, magic: bytes, path) -> None:
    if raw[:4] != magic:
        raise BadMagic(f"{path}: expected magic {magic!r}, found {raw[:4]!r}")


def _check_version(version: int, path) -> None:
    if version != FORMAT_VERSION:
        raise BadMagic(f"{path}: unsupported format version {version}")


def _check_positive(path, **fields: int) -> None:
    for name, value in fields.items():
        if value <= 0:
            raise DimensionMismatch(f"{path}: header field {name} must be positive, got {value}")


def _build(model, path, **fields):
    try:
        return model(**fields)
    except ValidationError as exc:
        raise DimensionMismatch(f"{path}: invalid header ({exc.error_count()} errors)") from exc


def _read_matrix(payload: bytes, rows: int, width: int, path) -> np.ndarray:
    if len(payload) % 4:
        raise TruncatedFile(f"{path}: payload is not a whole number of float32 values")
    values = len(payload) // 4
    expected = rows * width
    if values != expected:
        if rows and values % rows == 0 and values > 0:
            raise DimensionMismatch(f"{path}: row width {values // rows} != {width}")
        if values < expected:
            raise TruncatedFile(f"{path}: {values} values, header promises {expected}")
        raise DimensionMismatch(f"{path}: {values - expected} trailing values")
    return np.frombuffer(payload, dtype="<f4").reshape(rows, width).astype(np.float32)


def save_motion(clip: MotionClip, path) -> None:
    header = _MOTION_HEADER.pack(
        FORMAT_VERSION, clip.joint_count, clip.num_frames, clip.fps, clip.style_label
    )
    _write_bytes(path, MOTION_MAGIC + header + clip.frames.astype("<f4").tobytes())


def load_motion(path) -> MotionClip:
    raw = _read_bytes(path)
    _check_magic(raw, MOTION_MAGIC, path)
    start = 4 + _MOTION_HEADER.size
    if len(raw) < start:
        raise TruncatedFile(f"{path}: header truncated")
    version, joints, frames, fps, style = _MOTION_HEADER.unpack_from(raw, 4)
    _check_version(version, path)
    _check_positive(path, joints=joints, fps=fps)
    matrix = _read_matrix(raw[start:], frames, pose_width(joints), path)
    return _build(
        MotionClip,
        path,
        frames=matrix,
        fps=fps,
        joint_count=joints,
        style_label=style,
        clip_id=Path(path).stem,
    )


def save_music(track: MusicFeatureTrack, path) -> None:
    has_beats = track.beat_annotation is not None
    header = _MUSIC_HEADER.pack(
        FORMAT_VERSION, track.num_frames, track.fps, track.style_label, int(has_beats)
    )
    payload = MUSIC_MAGIC + header + track.frames.astype("<f4").tobytes()
    if has_beats:
        payload += track.beat_annotation.astype(np.uint8).tobytes()
    _write_bytes(path, payload)


def load_music(path) -> MusicFeatureTrack:
    raw = _read_bytes(path)
    _check_magic(raw, MUSIC_MAGIC, path)
    start = 4 + _MUSIC_HEADER.size
    if len(raw) < start:
        raise TruncatedFile(f"{path}: header truncated")
    version, frames, fps, style, has_beats = _MUSIC_HEADER.unpack_from(raw, 4)
    _check_version(version, path)
    _check_positive(path, fps=fps)
    body = raw[start:]
    feature_bytes = frames * MUSIC_DIM * 4
    beats = None
    if has_beats:
        if len(body) < feature_bytes + frames:
            raise TruncatedFile(f"{path}: beat annotation truncated")
        beats = np.frombuffer(body[feature_bytes: feature_bytes + frames], dtype=np.uint8)
        body = body[:feature_bytes]
    matrix = _read_matrix(body, frames, MUSIC_DIM, path)
    return _build(
        MusicFeatureTrack,
        path,
        frames=matrix,
        fps=fps,
        style_label=style,
        beat_annotation=beats,
        track_id=Path(path).stem,
    )


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        data = json.loads(_read_bytes(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IoFailure(f"{path}: not a JSON manifest ({exc})") from exc
    try:
        manifest = DatasetManifest.model_validate(data)
    except ValidationError as exc:
        raise IoFailure(f"{path}: invalid manifest ({exc.error_count()} errors)") from exc
    manifest = manifest.model_copy(update={"root": path.parent})
    manifest.check_paths()
    return manifest


def save_manifest(manifest: DatasetManifest, path) -> None:
    text = json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True)
    _write_bytes(path, text.encode("utf-8"))
