import numpy as np

from simdist.rng import RandomStream, SplitMix64, normals, u64_stream, uniforms


class TestSplitMix64:
    def test_scalar_and_vector_streams_agree(self):
        generator = SplitMix64(987654321)
        scalar = [generator.next_u64() for _ in range(50)]
        assert scalar == [int(v) for v in u64_stream(987654321, 50)]

    def test_stream_offset_is_a_slice(self):
        whole = u64_stream(5, 20)
        tail = u64_stream(5, 12, start=8)
        assert np.array_equal(whole[8:], tail)

    def test_seed_wraps_modulo_2_64(self):
        assert np.array_equal(u64_stream(-1, 4), u64_stream(2**64 - 1, 4))

    def test_uniform_range(self):
        values = uniforms(3, 10000)
        assert values.min() >= 0.0
        assert values.max() < 1.0

    def test_uniform_mean_near_half(self):
        assert abs(uniforms(4, 100000).mean() - 0.5) < 0.01

    def test_below_is_in_range_and_deterministic(self):
        first = [SplitMix64(9).below(7) for _ in range(1)]
        again = [SplitMix64(9).below(7) for _ in range(1)]
        assert first == again
        generator = SplitMix64(10)
        draws = [generator.below(7) for _ in range(1000)]
        assert min(draws) >= 0 and max(draws) < 7
        assert set(draws) == set(range(7))

    def test_sample_without_replacement(self):
        generator = SplitMix64(11)
        picks = generator.sample_without_replacement(10, 4)
        assert len(picks) == 4
        assert len(set(picks)) == 4
        assert all(0 <= p < 10 for p in picks)

    def test_sample_full_population_is_permutation(self):
        picks = SplitMix64(12).sample_without_replacement(8, 8)
        assert sorted(picks) == list(range(8))

    def test_sample_deterministic(self):
        a = SplitMix64(13).sample_without_replacement(100, 9)
        b = SplitMix64(13).sample_without_replacement(100, 9)
        assert a == b


class TestNormals:
    def test_moments(self):
        values = normals(21, 200000)
        assert abs(values.mean()) < 0.01
        assert abs(values.std() - 1.0) < 0.01

    def test_finite(self):
        assert np.isfinite(normals(22, 10001)).all()

    def test_deterministic(self):
        assert np.array_equal(normals(23, 999), normals(23, 999))

    def test_odd_count_is_prefix_of_even(self):
        assert np.array_equal(normals(24, 7), normals(24, 8)[:7])


class TestRandomStream:
    def test_uniform_blocks_concatenate(self):
        stream = RandomStream(31)
        split = np.concatenate([stream.uniforms(6), stream.uniforms(10)])
        assert np.array_equal(split, uniforms(31, 16))

    def test_normal_block_matches_module_function(self):
        stream = RandomStream(32)
        assert np.array_equal(stream.normals(11), normals(32, 11))

    def test_odd_normal_block_consumes_full_pairs(self):
        stream = RandomStream(33)
        stream.normals(3)
        after = stream.uniforms(1)
        assert after[0] == uniforms(33, 5)[4]
