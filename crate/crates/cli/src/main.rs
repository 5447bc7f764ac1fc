//! Command-line front door: generate an address map from a confidence raster
//! or an OSM extract, then answer forward/inverse geoqueries against it.
//!
//! Exit codes: 0 success, 2 input/config error, 3 degenerate input (nothing
//! mappable), 4 not found (unknown road or region).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use addrmap::extract::{build_graph, filter_endpoints, join_chains, thin, trace_chains};
use addrmap::{
    binarize, codec, geojson, load_raster, osm, store, AddressMap, AffinitySigma, BuildOptions,
    Error, ExtractParams, PartitionParams,
};

#[derive(Parser)]
#[command(name = "addrmap", version, about = "Generative street addressing: build and query address maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print progress diagnostics to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build an address map from a raster or an OSM extract.
    Generate(GenerateArgs),
    /// Resolve an address string to coordinates.
    Geocode {
        /// Path to an ADDRMAP index file.
        #[arg(long)]
        index: PathBuf,
        /// Address string, e.g. 715D.NE127.Dhule.MhIn
        address: String,
    },
    /// Resolve coordinates to the nearest address.
    Revgeo(RevgeoArgs),
    /// Export an address map as GeoJSON.
    Export {
        #[arg(long)]
        index: PathBuf,
        /// Output GeoJSON path.
        #[arg(long)]
        geojson: PathBuf,
    },
    /// Print summary statistics of an address map.
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Road-confidence raster (binary PGM, maxval 255).
    #[arg(long, requires = "world")]
    raster: Option<PathBuf>,
    /// World file georeferencing the raster (4 lines + optional ANCHOR).
    #[arg(long)]
    world: Option<PathBuf>,
    /// OSM XML extract.
    #[arg(long)]
    osm: Option<PathBuf>,

    /// Output ADDRMAP index path.
    #[arg(long)]
    out: PathBuf,
    /// Also export the map as GeoJSON.
    #[arg(long)]
    geojson: Option<PathBuf>,
    /// Debug: dump traced centerline chains as GeoJSON (raster input only).
    #[arg(long)]
    dump_chains: Option<PathBuf>,

    #[arg(long)]
    city: String,
    /// 2-letter title-case state code, e.g. Mh.
    #[arg(long)]
    state: Option<String>,
    /// 2-letter title-case country code, e.g. In.
    #[arg(long)]
    country: String,
    /// 4-digit version year stamped into the map.
    #[arg(long)]
    year: Option<u16>,

    /// Binarization threshold on the 0..255 confidences.
    #[arg(long, default_value_t = 128)]
    threshold: u8,
    /// Maximum endpoint gap (pixels) bridged when joining chains.
    #[arg(long, default_value_t = 10)]
    join_radius_px: u32,
    /// Minimum mean confidence along a candidate bridge.
    #[arg(long, default_value_t = 64)]
    join_confidence: u8,
    /// Window (pixels) for endpoint orientation and straightening.
    #[arg(long, default_value_t = 7)]
    endpoint_window_px: u32,
    /// Number of orientation classes over 180 degrees.
    #[arg(long, default_value_t = 4)]
    orientation_buckets: u32,
    /// Minimum chain length in pixels.
    #[arg(long, default_value_t = 6)]
    min_chain_px: u32,

    /// Regions stop splitting at this edge count.
    #[arg(long, default_value_t = 64)]
    max_region_edges: usize,
    /// Reject splits with a normalized cut above this value.
    #[arg(long, default_value_t = 0.5)]
    ncut_stop: f64,
    /// Fixed affinity length scale in meters (default: mean edge length).
    #[arg(long)]
    affinity_sigma: Option<f64>,
}

#[derive(Args)]
struct RevgeoArgs {
    #[arg(long)]
    index: PathBuf,
    /// Local x coordinate in meters.
    #[arg(long, requires = "y", conflicts_with_all = ["lat", "lon"], allow_negative_numbers = true)]
    x: Option<f64>,
    /// Local y coordinate in meters.
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    /// Latitude in degrees (requires an anchored map).
    #[arg(long, requires = "lon", allow_negative_numbers = true)]
    lat: Option<f64>,
    /// Longitude in degrees.
    #[arg(long, allow_negative_numbers = true)]
    lon: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateInput(_) => 3,
        Error::UnknownRoad(_) | Error::UnknownRegion(_) => 4,
        _ => 2,
    }
}

fn run(cli: &Cli) -> addrmap::Result<()> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(args, cli.verbose),
        Command::Geocode { index, address } => cmd_geocode(index, address),
        Command::Revgeo(args) => cmd_revgeo(args),
        Command::Export { index, geojson: out } => {
            let map = store::load(index)?;
            geojson::export_geojson(&map, out)
        }
        Command::Stats { index } => cmd_stats(index),
    }
}

fn cmd_generate(args: &GenerateArgs, verbose: bool) -> addrmap::Result<()> {
    let partition = PartitionParams {
        max_region_edges: args.max_region_edges,
        ncut_stop: args.ncut_stop,
        affinity_sigma: match args.affinity_sigma {
            Some(s) => AffinitySigma::Fixed(s),
            None => AffinitySigma::MeanEdgeLength,
        },
    };
    let extract = ExtractParams {
        threshold: args.threshold,
        join_radius_px: args.join_radius_px,
        join_confidence: args.join_confidence,
        endpoint_window_px: args.endpoint_window_px,
        orientation_buckets: args.orientation_buckets,
        min_chain_px: args.min_chain_px,
    };

    let (graph, anchor) = match (&args.raster, &args.world, &args.osm) {
        (Some(_), _, Some(_)) | (None, _, None) => {
            return Err(Error::Validation(
                "give exactly one input source: --raster/--world or --osm".into(),
            ))
        }
        (Some(raster_path), Some(world_path), None) => {
            extract.validate()?;
            let raster = load_raster(raster_path, world_path)?;
            if verbose {
                eprintln!("loaded raster {}x{}", raster.width, raster.height);
            }
            let mask = binarize(&raster, extract.threshold);
            let skeleton = thin(&mask);
            let chains = trace_chains(&skeleton, &extract);
            let chains = join_chains(chains, &raster, &extract);
            let chains = filter_endpoints(chains, &extract);
            if verbose {
                eprintln!("traced {} chains", chains.len());
            }
            if let Some(dump) = &args.dump_chains {
                let value = geojson::chains_to_geojson(&chains, &raster.transform);
                std::fs::write(dump, serde_json::to_string_pretty(&value).expect("valid json"))?;
            }
            let graph = build_graph(&chains, &extract, &raster.transform)?;
            (graph, raster.transform.geo_anchor)
        }
        (None, _, Some(osm_path)) => {
            if args.dump_chains.is_some() {
                return Err(Error::Validation("--dump-chains needs a raster input".into()));
            }
            let subset = osm::parse_osm(osm_path)?;
            if subset.warnings > 0 {
                eprintln!("warning: dropped {} unresolved node reference(s)", subset.warnings);
            }
            let (graph, anchor) = osm::to_graph(&subset)?;
            (graph, Some(anchor))
        }
        (Some(_), None, None) => unreachable!("clap enforces --world with --raster"),
    };
    if verbose {
        eprintln!(
            "graph: {} intersections, {} road segments",
            graph.node_count(),
            graph.edge_count()
        );
    }

    let options = BuildOptions {
        partition,
        city: args.city.clone(),
        state_code: args.state.clone(),
        country_code: args.country.clone(),
        version_year: args.year,
        geo_anchor: anchor,
    };
    let map = AddressMap::build(graph, &options)?;
    store::save(&map, &args.out)?;
    if let Some(out) = &args.geojson {
        geojson::export_geojson(&map, out)?;
    }

    print_summary(&map);
    Ok(())
}

fn print_summary(map: &AddressMap) {
    println!("regions: {}", map.region_count());
    println!("roads: {}", map.road_count());
    println!("total length: {:.3} km", map.total_length_km());
}

fn cmd_geocode(index: &Path, address: &str) -> addrmap::Result<()> {
    let map = store::load(index)?;
    let record = codec::parse(address)?;
    let p = map.geocode(&record)?;
    match p.lat_lon {
        Some((lat, lon)) => println!("{:.3} {:.3} {:.8} {:.8}", p.x, p.y, lat, lon),
        None => println!("{:.3} {:.3}", p.x, p.y),
    }
    Ok(())
}

fn cmd_revgeo(args: &RevgeoArgs) -> addrmap::Result<()> {
    let map = store::load(&args.index)?;
    let record = match (args.x, args.y, args.lat, args.lon) {
        (Some(x), Some(y), None, None) => map.reverse_geocode((x, y))?,
        (None, None, Some(lat), Some(lon)) => map.reverse_geocode_lat_lon(lat, lon)?,
        _ => {
            return Err(Error::Validation(
                "give either --x/--y (meters) or --lat/--lon (degrees)".into(),
            ))
        }
    };
    println!("{}", codec::format(&record)?);
    Ok(())
}

fn cmd_stats(index: &Path) -> addrmap::Result<()> {
    let map = store::load(index)?;
    println!("city: {}", map.city);
    if let Some(state) = &map.state_code {
        println!("state: {state}");
    }
    println!("country: {}", map.country_code);
    if let Some(year) = map.version_year {
        println!("year: {year}");
    }
    if let Some((lat, lon)) = map.geo_anchor {
        println!("anchor: {lat} {lon}");
    }
    print_summary(&map);
    Ok(())
}
