//! Challenge bundles: an obfuscated program for contestants plus the setter's secret.
//!
//! ```text
//! <dir>/public/program.bin   canonical binary encoding
//! <dir>/public/program.json  JSON mirror
//! <dir>/public/meta.json     ids, n, flavour, asset schema, bundle id
//! <dir>/secret/aux.bin       instance aux
//! <dir>/secret/seed.txt      generation seed, hex
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::registry;
use super::report::write_atomic;
use crate::error::{Error, Result};
use crate::formalism::{AssetSpec, CandidateSchema, Instance, Obfuscator, ProgramClass, Seed};
use crate::ir::hash::{digest, tags};
use crate::ir::{BitStr, Program};

pub const FORMAT_VERSION: u32 = 1;

/// Aux shorter than this is not scanned for: short byte strings turn up by chance.
pub const MIN_SCAN_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavour {
    /// Anyone can check a candidate by running the published program.
    Public,
    /// Only the holder of the secret part can check a candidate.
    Setter,
}

impl std::str::FromStr for Flavour {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "public" => Ok(Flavour::Public),
            "setter" => Ok(Flavour::Setter),
            _ => Err(Error::Precondition(format!("unknown flavour {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub bundle_id: String,
    pub class_id: String,
    pub obf_id: String,
    pub asset_id: String,
    pub asset_schema: String,
    pub n: usize,
    pub flavour: Flavour,
    pub format_version: u32,
}

impl BundleMeta {
    fn id_for(&self, program_bin: &[u8]) -> String {
        let unnamed = BundleMeta {
            bundle_id: String::new(),
            ..self.clone()
        };
        let mut buf = program_bin.to_vec();
        buf.extend(serde_json::to_vec(&unnamed).expect("meta serializes"));
        hex::encode(digest(tags::BUNDLE, &buf))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengeSpec {
    pub class: String,
    pub obf: String,
    pub n: usize,
    pub flavour: Flavour,
    pub seed: Seed,
    /// Defaults to the class's public asset, or for setter bundles its first secret asset.
    pub asset: Option<String>,
}

struct Parts {
    class: Arc<dyn ProgramClass>,
    obf: Arc<dyn Obfuscator>,
    asset: Arc<dyn AssetSpec>,
}

fn resolve(class_id: &str, obf_id: &str, asset: Option<&str>, flavour: Flavour) -> Result<Parts> {
    let class = registry::class(class_id)?;
    let obf = registry::obfuscator(obf_id)?;
    if obf.class_id() != class.id() {
        return Err(Error::ClassMismatch(
            obf.class_id().to_string(),
            class.id().to_string(),
        ));
    }
    let asset_id = match (asset, flavour) {
        (Some(a), _) => a.to_string(),
        (None, Flavour::Public) => class
            .public_asset()
            .ok_or_else(|| Error::FlavourUnsupported {
                asset: class.default_asset().to_string(),
            })?
            .to_string(),
        (None, Flavour::Setter) => class
            .assets()
            .iter()
            .find(|a| a.needs_aux())
            .map_or_else(|| class.default_asset().to_string(), |a| a.id().to_string()),
    };
    let asset = class.asset(&asset_id).ok_or_else(|| Error::UnknownId {
        kind: "asset",
        id: asset_id.clone(),
    })?;
    if flavour == Flavour::Public && asset.needs_aux() {
        return Err(Error::FlavourUnsupported { asset: asset_id });
    }
    Ok(Parts { class, obf, asset })
}

fn instance_and_program(parts: &Parts, n: usize, seed: &Seed) -> Result<(Instance, Program)> {
    let inst =
        crate::formalism::sample_instance(parts.class.as_ref(), n, &seed.derive("instance"))?;
    let program = parts.obf.apply(&inst, &seed.derive("obf"))?;
    Ok((inst, program))
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}

/// Fails if any public file contains `aux`, raw or hex encoded.
pub fn secrecy_scan(public_files: &[&[u8]], aux: &[u8]) -> Result<()> {
    if aux.len() < MIN_SCAN_LEN {
        return Ok(());
    }
    let hexed = hex::encode(aux);
    for f in public_files {
        if contains(f, aux) || contains(f, hexed.as_bytes()) {
            return Err(Error::BundleCorrupt(
                "public part contains the instance aux".into(),
            ));
        }
    }
    Ok(())
}

/// Generates the instance and obfuscated program from `spec.seed` and writes the bundle.
pub fn make_challenge(spec: &ChallengeSpec, out: &Path) -> Result<BundleMeta> {
    let parts = resolve(&spec.class, &spec.obf, spec.asset.as_deref(), spec.flavour)?;
    let (inst, program) = instance_and_program(&parts, spec.n, &spec.seed)?;

    let program_bin = program.to_bytes()?;
    let mut program_json = serde_json::to_string_pretty(&program.to_json()).expect("json value");
    program_json.push('\n');
    let mut meta = BundleMeta {
        bundle_id: String::new(),
        class_id: parts.class.id().to_string(),
        obf_id: parts.obf.id().to_string(),
        asset_id: parts.asset.id().to_string(),
        asset_schema: parts.asset.schema(spec.n).describe(),
        n: spec.n,
        flavour: spec.flavour,
        format_version: FORMAT_VERSION,
    };
    meta.bundle_id = meta.id_for(&program_bin);
    let mut meta_json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    meta_json.push('\n');

    secrecy_scan(
        &[&program_bin, program_json.as_bytes(), meta_json.as_bytes()],
        &inst.aux,
    )?;

    let public = out.join("public");
    let secret = out.join("secret");
    fs::create_dir_all(&public)?;
    fs::create_dir_all(&secret)?;
    write_atomic(&public.join("program.bin"), &program_bin)?;
    write_atomic(&public.join("program.json"), program_json.as_bytes())?;
    write_atomic(&public.join("meta.json"), meta_json.as_bytes())?;
    write_atomic(&secret.join("aux.bin"), &inst.aux)?;
    write_atomic(
        &secret.join("seed.txt"),
        format!("{}\n", spec.seed.to_hex()).as_bytes(),
    )?;
    Ok(meta)
}

pub struct Secret {
    pub aux: Vec<u8>,
    pub seed: Seed,
}

pub struct Bundle {
    pub dir: PathBuf,
    pub meta: BundleMeta,
    pub program: Program,
    pub secret: Option<Secret>,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::BundleCorrupt(format!("{}: {e}", path.display())))
}

/// Reads a bundle and checks its id and program encodings. The secret part is optional.
pub fn load_bundle(dir: &Path) -> Result<Bundle> {
    let public = dir.join("public");
    let meta: BundleMeta = serde_json::from_slice(&read(&public.join("meta.json"))?)
        .map_err(|e| Error::BundleCorrupt(format!("meta.json: {e}")))?;
    if meta.format_version != FORMAT_VERSION {
        return Err(Error::BundleCorrupt(format!(
            "format version {} is not {FORMAT_VERSION}",
            meta.format_version
        )));
    }
    let program_bin = read(&public.join("program.bin"))?;
    if meta.id_for(&program_bin) != meta.bundle_id {
        return Err(Error::BundleCorrupt(
            "bundle id does not match contents".into(),
        ));
    }
    let program = Program::from_bytes(&program_bin)?;

    let secret_dir = dir.join("secret");
    let secret = if secret_dir.is_dir() {
        let aux = read(&secret_dir.join("aux.bin"))?;
        let seed_text = String::from_utf8(read(&secret_dir.join("seed.txt"))?)
            .map_err(|e| Error::BundleCorrupt(e.to_string()))?;
        Some(Secret {
            aux,
            seed: Seed::from_hex(&seed_text)?,
        })
    } else {
        None
    };
    Ok(Bundle {
        dir: dir.to_path_buf(),
        meta,
        program,
        secret,
    })
}

impl Bundle {
    fn parts(&self) -> Result<Parts> {
        resolve(
            &self.meta.class_id,
            &self.meta.obf_id,
            Some(&self.meta.asset_id),
            self.meta.flavour,
        )
    }

    /// Regenerates the instance from the secret seed and checks it against the bundle.
    pub fn regenerate(&self) -> Result<Instance> {
        let secret = self.secret.as_ref().ok_or(Error::MissingSecret)?;
        let parts = self.parts()?;
        let (inst, program) = instance_and_program(&parts, self.meta.n, &secret.seed)?;
        if inst.aux != secret.aux || program != self.program {
            return Err(Error::BundleCorrupt(
                "secret seed does not reproduce the bundle".into(),
            ));
        }
        Ok(inst)
    }

    /// Public bundles run the published program; setter bundles consult the secret.
    pub fn verify(&self, cand: &[u8]) -> Result<bool> {
        let parts = self.parts()?;
        match self.meta.flavour {
            Flavour::Public => parts.asset.verify_public(&self.program, self.meta.n, cand),
            Flavour::Setter => parts.asset.verify(&self.regenerate()?, cand),
        }
    }

    /// The correct asset. Needs the secret part.
    pub fn reveal(&self) -> Result<Vec<u8>> {
        Ok(self.parts()?.asset.true_asset(&self.regenerate()?))
    }

    pub fn asset(&self) -> Result<Arc<dyn AssetSpec>> {
        Ok(self.parts()?.asset)
    }

    pub fn schema(&self) -> Result<CandidateSchema> {
        Ok(self.asset()?.schema(self.meta.n))
    }
}

/// Candidate text as typed by a contestant: hex for bit strings (an optional `0x`,
/// left-padded to the schema width), JSON for DFAs.
pub fn candidate_from_text(schema: CandidateSchema, text: &str) -> Result<Vec<u8>> {
    let text = text.trim();
    match schema {
        CandidateSchema::Dfa => Ok(text.as_bytes().to_vec()),
        CandidateSchema::Bits { width } => {
            let digits = text.strip_prefix("0x").unwrap_or(text);
            let len = width.div_ceil(8) * 2;
            if digits.is_empty() || digits.len() > len {
                return Err(Error::Schema(format!(
                    "expected up to {len} hex digits for {width} bits"
                )));
            }
            let bytes = hex::decode(format!("{digits:0>len$}"))
                .map_err(|e| Error::Schema(e.to_string()))?;
            Ok(BitStr::from_bytes(width, &bytes)
                .map_err(|e| Error::Schema(e.to_string()))?
                .into_bytes())
        }
    }
}

pub fn candidate_to_text(schema: CandidateSchema, cand: &[u8]) -> String {
    match schema {
        CandidateSchema::Dfa => String::from_utf8_lossy(cand).into_owned(),
        CandidateSchema::Bits { .. } => hex::encode(cand),
    }
}
