use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use addrmap::fixture::GridCity;
use addrmap::geocode::{AddressMap, BuildOptions};
use addrmap::partition::{partition, PartitionParams};
use addrmap::{binarize, extract_graph, ExtractParams, SpatialIndex};

fn bench_extract(c: &mut Criterion) {
    let city = GridCity::default();
    let raster = city.raster();
    let params = ExtractParams::default();

    c.bench_function("binarize_421px", |b| {
        b.iter(|| black_box(binarize(&raster, params.threshold)))
    });
    c.bench_function("extract_graph_grid_421px", |b| {
        b.iter(|| black_box(extract_graph(&raster, &params).unwrap()))
    });
}

fn bench_partition(c: &mut Criterion) {
    // 8x8 grid: 64 intersections, 112 road segments.
    let big = GridCity {
        lines: 8,
        spacing_m: 100.0,
        pixel_size: 0.5,
    };
    let graph = big.graph();
    let params = PartitionParams {
        max_region_edges: 16,
        ncut_stop: 0.8,
        ..PartitionParams::default()
    };
    c.bench_function("partition_grid_8x8", |b| {
        b.iter(|| black_box(partition(&graph, &params).unwrap()))
    });
}

fn bench_geocode(c: &mut Criterion) {
    let graph = GridCity::default().graph();
    let options = BuildOptions {
        partition: PartitionParams {
            max_region_edges: 6,
            ncut_stop: 0.65,
            ..PartitionParams::default()
        },
        ..BuildOptions::new("Gridville", "In")
    };
    let map = AddressMap::build(graph, &options).unwrap();

    c.bench_function("spatial_index_build", |b| {
        b.iter(|| black_box(SpatialIndex::build(map.graph())))
    });
    c.bench_function("reverse_geocode_1000", |b| {
        b.iter(|| {
            let mut s = 7u64;
            for _ in 0..1000 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = ((s >> 33) % 2600) as f64 / 10.0 - 30.0;
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let y = ((s >> 33) % 2600) as f64 / 10.0 - 30.0;
                black_box(map.reverse_geocode((x, y)).unwrap());
            }
        })
    });
    let record = map.reverse_geocode((2.0, 48.0)).unwrap();
    c.bench_function("geocode_one", |b| {
        b.iter(|| black_box(map.geocode(&record).unwrap()))
    });
}

criterion_group!(benches, bench_extract, bench_partition, bench_geocode);
criterion_main!(benches);
