# Pick surface taps out of an audio track.
#
# A tap on the prototype surface shows up as a short wideband burst. The
# detector band-passes the stream, windows it, and reports a click when
# the peak level clears a threshold; a debounce interval keeps one
# physical tap from double-firing. Chunk boundaries don't matter: the
# filter carries state across them.

import numpy as np

from vip.audio import AudioChunk, BandPassFilter, ClickParams, detect_clicks, write_wav
from vip.synth import taps_track
from pathlib import Path

OUT = Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    tap_times = [150.0, 400.0, 430.0, 900.0]   # 400 + 430 fall in one debounce window
    track = taps_track(tap_times, total_ms=1200.0, amplitude=0.8)
    write_wav(track, OUT / "taps.wav")

    params = ClickParams()
    clicks = detect_clicks([track], params, track.sample_rate)
    print(f"{len(tap_times)} bursts, {len(clicks)} clicks "
          f"(debounce {params.debounce_ms:.0f} ms merges the 400/430 pair)")
    for c in clicks:
        print(f"  click at {c.time_ms:7.1f} ms, peak {c.peak_level:.3f}")

    # same stream, sliced into ragged chunks: identical output
    cuts = [0, 1000, 1017, 9000, len(track.samples)]
    chunks = [AudioChunk(track.samples[a:b], track.sample_rate, a / 16.0)
              for a, b in zip(cuts, cuts[1:])]
    rechunked = detect_clicks(chunks, params, track.sample_rate)
    assert [c.time_ms for c in rechunked] == [c.time_ms for c in clicks]
    print("chunked reprocessing: identical click times")

    # the band actually shapes the spectrum
    filt = BandPassFilter(params.f_low, params.f_high, track.sample_rate)
    t = np.arange(track.sample_rate) / track.sample_rate
    for freq in (200.0, 1800.0, 7000.0):
        out = filt.process(AudioChunk(np.sin(2 * np.pi * freq * t),
                                      track.sample_rate, 0.0))
        tail = out.samples[-3200:]
        gain = float(np.sqrt(np.mean(tail ** 2)) * np.sqrt(2.0))
        print(f"  {freq:6.0f} Hz -> gain {gain:.3f}")
        filt = BandPassFilter(params.f_low, params.f_high, track.sample_rate)
    print(f"wrote taps.wav to {OUT}/")


if __name__ == "__main__":
    main()
