# tests/test_statistics.py
import threading

from fcopt.statistics import StatisticsTracker, StatKey


class TestStatisticsTracker:
    def test_counts_from_worker_threads_are_not_lost(self):
        # Arrange
        stats = StatisticsTracker()
        start = threading.Barrier(8)

        def bump():
            start.wait()
            for _ in range(5000):
                stats.add_stat(StatKey.OUTER_ITERATIONS)

        workers = [threading.Thread(target=bump) for _ in range(8)]

        # Act
        for worker in workers:
            worker.start()
        for worker in workers:
            worker.join()

        # Assert
        assert stats.get(StatKey.OUTER_ITERATIONS) == 40000

    def test_as_dict_lists_non_zero_counters_in_declaration_order(self):
        stats = StatisticsTracker()
        stats.add_stat(StatKey.CHECKS_RUN, 3)
        stats.add_stat(StatKey.METHOD_RUNS)

        assert list(stats.as_dict().items()) == [("method_runs", 1), ("checks_run", 3)]
        assert stats.get(StatKey.CHECKS_FAILED) == 0

    def test_output_path_is_absolute(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        stats = StatisticsTracker()

        stats.set_output_path("trace.csv")

        assert stats.output_path == str(tmp_path / "trace.csv")
