"""
Style-indexed pools of motion clips and music tracks.

Music and motion are stored in separate pools keyed by style. Samplers reach music
only through ``music_of_style`` with an exclusion list, which is how the unpaired
scheme avoids ever touching the target clip's own soundtrack.
"""

import threading
from pathlib import Path
from typing import Iterable, Optional, Union

from loguru import logger

from ..core.errors import BadStyle, DimensionMismatch
from ..models.motion_model import ContactTrack, DatasetManifest, MotionClip, MusicFeatureTrack
from ..motion.augment import mirror_motion
from ..motion.contacts import DEFAULT_SPEED_THRESHOLD, extract_foot_contacts
from ..motion.io import load_manifest, load_motion, load_music

MIRROR_SUFFIX = "~mirror"


def base_id(clip_id: str) -> str:
    return clip_id[: -len(MIRROR_SUFFIX)] if clip_id.endswith(MIRROR_SUFFIX) else clip_id


class DanceDataset:
    def __init__(
        self,
        motions: Iterable[MotionClip],
        musics: Iterable[MusicFeatureTrack],
        styles: Iterable[str],
        mirror: bool = False,
        contact_threshold: float = DEFAULT_SPEED_THRESHOLD,
    ):
        self.styles = list(styles)
        self.contact_threshold = contact_threshold
        self.motions: list[MotionClip] = list(motions)
        self.musics: list[MusicFeatureTrack] = list(musics)
        for item in [*self.motions, *self.musics]:
            if item.style_label >= len(self.styles):
                raise BadStyle(f"style {item.style_label} outside the {len(self.styles)}-style vocabulary")
        if mirror:
            self.motions += [mirror_motion(clip) for clip in self.motions]
        self._contacts: dict[str, ContactTrack] = {}
        self._contacts_lock = threading.Lock()
        self._index()

    @classmethod
    def from_manifest(
        cls,
        manifest: Union[str, Path, DatasetManifest],
        mirror: bool = False,
        contact_threshold: float = DEFAULT_SPEED_THRESHOLD,
    ) -> "DanceDataset":
        if not isinstance(manifest, DatasetManifest):
            manifest = load_manifest(manifest)
        motions, musics = [], []
        for entry in manifest.clips:
            motion = load_motion(manifest.resolve(entry.motion)).model_copy(
                update={"clip_id": entry.id, "style_label": entry.style}
            )
            motion.check_rotations()
            music = load_music(manifest.resolve(entry.music)).model_copy(
                update={"track_id": entry.id, "style_label": entry.style}
            )
            motions.append(motion)
            musics.append(music)
        logger.info("loaded {} clips over {} styles", len(motions), len(manifest.styles))
        return cls(motions, musics, manifest.styles, mirror=mirror, contact_threshold=contact_threshold)

    @property
    def style_count(self) -> int:
        return len(self.styles)

    def _index(self) -> None:
        self._motion_pools: dict[int, list[MotionClip]] = {}
        for clip in self.motions:
            self._motion_pools.setdefault(clip.style_label, []).append(clip)
        self._music_pools: dict[int, list[MusicFeatureTrack]] = {}
        for track in self.musics:
            self._music_pools.setdefault(track.style_label, []).append(track)
        self._music_by_id = {track.track_id: track for track in self.musics}

    def present_styles(self) -> list[int]:
        return sorted(self._motion_pools)

    def clips_of_style(self, style: int, exclude: Optional[str] = None) -> list[MotionClip]:
        pool = self._motion_pools.get(style, [])
        if exclude is None:
            return list(pool)
        return [clip for clip in pool if base_id(clip.clip_id) != base_id(exclude)]

    def music_of_style(self, style: int, exclude: Optional[str] = None) -> list[MusicFeatureTrack]:
        pool = self._music_pools.get(style, [])
        if exclude is None:
            return list(pool)
        return [track for track in pool if track.track_id != base_id(exclude)]

    def aligned_music(self, clip_id: str) -> MusicFeatureTrack:
        """The soundtrack recorded with ``clip_id`` (paired ablation only)."""
        track = self._music_by_id.get(base_id(clip_id))
        if track is None:
            raise DimensionMismatch(f"no music track is paired with {clip_id}")
        return track

    def contacts(self, clip: MotionClip) -> ContactTrack:
        """Foot contacts of ``clip``, computed once and shared across prefetch threads."""
        with self._contacts_lock:
            track = self._contacts.get(clip.clip_id)
            if track is None:
                track = extract_foot_contacts(clip, self.contact_threshold)
                self._contacts[clip.clip_id] = track
        return track

    def __len__(self) -> int:
        return len(self.motions)
