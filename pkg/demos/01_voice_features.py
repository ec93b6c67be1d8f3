# Walk through the acoustic feature extractor on synthetic voices:
# a steady tone, then one with planted jitter/shimmer like a PD voice.

import numpy as np

from pdscreen.cohort import VoiceProfile, synth_voice_clip
from pdscreen.speech import extract_speech_features, jitter_shimmer, pitch_track

rng = np.random.default_rng(1)

steady = synth_voice_clip(rng, VoiceProfile(f0_hz=140, jitter_sigma=0.002, shimmer_sigma=0.02))
shaky = synth_voice_clip(rng, VoiceProfile(f0_hz=140, jitter_sigma=0.025, shimmer_sigma=0.10))

for label, clip in [("steady", steady), ("perturbed", shaky)]:
    pt = pitch_track(clip)
    jitter, shimmer = jitter_shimmer(clip, pt)
    voiced = pt.f0_hz[pt.voiced_flags]
    print(f"--- {label} voice ({clip.duration_s:.1f} s @ {clip.sample_rate_hz} Hz)")
    print(f"    f0 median {np.median(voiced):6.1f} Hz   voiced {pt.voiced_flags.mean():.0%}")
    print(f"    jitter {jitter:7.4f}   shimmer {shimmer:7.4f}")

print()
print("full speech.v1 vector for the perturbed voice:")
fv = extract_speech_features(shaky)
for name, value in zip(fv.names, fv.values):
    print(f"    {name:22s} {value:10.4f}")
