"""Decode an animate run with Pillow: frame count, delays, loop flag and the
boundary frames against the PNG renders of the same stages."""
import subprocess
import sys
import tempfile
from pathlib import Path

from PIL import Image, ImageSequence


def main() -> int:
    binary, config = sys.argv[1], sys.argv[2]
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        common = ["--config", config, "--out", str(out), "--views", "top"]
        subprocess.run([binary, "animate", *common, "--fpt", "3"], check=True, stdout=subprocess.DEVNULL)
        subprocess.run([binary, "render", *common], check=True, stdout=subprocess.DEVNULL)

        gif = Image.open(out / "render_top.gif")
        frames = [f.convert("RGB") for f in ImageSequence.Iterator(gif)]
        errors = []
        if len(frames) != 10:
            errors.append(f"expected 10 frames, got {len(frames)}")
        if gif.info.get("loop") != 0:
            errors.append(f"loop = {gif.info.get('loop')!r}")
        for i, frame in enumerate(ImageSequence.Iterator(Image.open(out / "render_top.gif"))):
            if frame.info.get("duration") != 500:
                errors.append(f"frame {i} duration {frame.info.get('duration')}")
        for stage in range(4):
            if stage * 3 >= len(frames):
                break
            png = Image.open(out / f"render_stage{stage + 1}_top.png").convert("RGB")
            got = frames[stage * 3]
            worst = max(
                max(abs(a - b) for a, b in zip(p, q)) for p, q in zip(png.getdata(), got.getdata())
            )
            # Palette reduction may move a color, never by much.
            if worst > 48:
                errors.append(f"stage {stage + 1} frame differs by {worst}")
        for e in errors:
            print("FAIL", e)
        if not errors:
            print(f"PASS pillow decoded {len(frames)} frames")
        return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main())
