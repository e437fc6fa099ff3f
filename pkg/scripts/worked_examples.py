"""Print reference numbers next to what the package computes:
irregularity metrics, chanted-contour ratios, speech rates, and the tone
transducer example."""

from prosodia.metrics import coeff_var, npvi, rpvi, sd, speech_rate, vi_deterding
from prosodia.scales import chroma_from_means
from prosodia.tonefst import annotate_steps, transduce

ENGLISH = [170, 40, 210, 120, 180, 210, 140, 120, 150, 170, 130, 130, 80, 350, 80, 320]


def main():
    print("English syllable durations (ms):", ENGLISH)
    print(f"  sd        {sd(ENGLISH):8.3f}  (population: {sd(ENGLISH, 'population'):.3f})")
    print(f"  coeff_var {coeff_var(ENGLISH):8.3f}")
    print(f"  rpvi      {rpvi(ENGLISH):8.3f}")
    print(f"  npvi      {npvi(ENGLISH):8.3f}")
    print(f"  vi_det    {vi_deterding(ENGLISH):8.3f}")

    print("\nnPVI of sequences with equal pairwise ratios:")
    for seq in [(2, 4, 2, 4, 2, 4), (2, 4, 8, 16, 32, 16), (32, 16, 8, 16, 8, 4)]:
        print(f"  {seq}: npvi {npvi(seq):.3f}  vi_det {vi_deterding(seq):.3f}")

    print("\nChanted contours (F0_1 mean, F0_2 mean):")
    for name, f1, f2 in [("hello", 212, 177), ("goodbye", 201, 168),
                         ("Johnny", 240, 196), ("where are you", 230, 197)]:
        r = chroma_from_means(f1, f2)
        print(f"  {name:14s} ratio {r.ratio:.3f}  {r.semitone_distance:5.2f} st  "
              f"{r.nearest_interval} {r.deviation_cents:+.0f} cents")

    print("\nSpeech rate from median syllable duration:")
    for med in (196, 174):
        print(f"  {med} ms -> {speech_rate([med]).median_rate:.2f} syll/s")

    lex = "LHLLHLLHLLH"
    print(f"\nTerraced tones: {lex} -> {transduce(lex)}")
    print("  steps:", " ".join(m[0].upper() if m != "plain" else "." for m in annotate_steps(lex)))


if __name__ == "__main__":
    main()
