//! Fully-connected feed-forward ReLU networks with a scalar output.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sign::{Sign, SignSequence};

/// Layer widths `(n0, n1, ..., nm, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Architecture(Vec<usize>);

impl Architecture {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Architecture(format!(
                "need at least an input and an output dimension, got {dims:?}"
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Architecture(format!("all widths must be positive: {dims:?}")));
        }
        if *dims.last().unwrap() != 1 {
            return Err(Error::Architecture(format!("output dimension must be 1: {dims:?}")));
        }
        Ok(Architecture(dims))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn input_dim(&self) -> usize {
        self.0[0]
    }

    /// Hidden widths `n1..nm`.
    pub fn hidden(&self) -> &[usize] {
        &self.0[1..self.0.len() - 1]
    }

    pub fn total_neurons(&self) -> usize {
        self.hidden().iter().sum()
    }

    /// True for the `(n, n+1, 1)` shape.
    pub fn is_shallow_simplex(&self) -> bool {
        self.0.len() == 3 && self.0[1] == self.0[0] + 1
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineLayer {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

impl AffineLayer {
    pub fn new(weights: DMatrix<f64>, bias: DVector<f64>) -> Result<Self> {
        if weights.nrows() != bias.len() {
            return Err(Error::Shape(format!(
                "weight matrix has {} rows but bias has length {}",
                weights.nrows(),
                bias.len()
            )));
        }
        Ok(AffineLayer { weights, bias })
    }

    pub fn from_rows(rows: &[Vec<f64>], bias: &[f64]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Shape("ragged weight matrix".into()));
        }
        let weights = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
        AffineLayer::new(weights, DVector::from_column_slice(bias))
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.weights * x + &self.bias
    }
}

/// `F = G ∘ ReLU ∘ A_m ∘ ... ∘ ReLU ∘ A_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    layers: Vec<AffineLayer>,
    output: AffineLayer,
    arch: Architecture,
}

/// Exact affine restriction of every layer composite to one cell.
///
/// `preact_*` describe the node maps (pre-activations) of each layer, the
/// remaining fields the post-ReLU layer maps. Rows of neurons whose sign is
/// not `+` are zeroed in the post-activation maps.
#[derive(Debug, Clone, PartialEq)]
pub struct CellAffineForm {
    pub cell: SignSequence,
    pub preact_jacobians: Vec<DMatrix<f64>>,
    pub preact_biases: Vec<DVector<f64>>,
    pub jacobians: Vec<DMatrix<f64>>,
    pub biases: Vec<DVector<f64>>,
    pub gradient: DVector<f64>,
    pub offset: f64,
}

impl CellAffineForm {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.gradient.iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>() + self.offset
    }
}

/// Partial affine trace for a prefix of a sign sequence.
pub(crate) struct PrefixForms {
    /// Node-map rows and offsets for every neuron covered by the prefix plus
    /// the whole next layer, flattened in neuron order.
    pub rows: Vec<DVector<f64>>,
    pub offsets: Vec<f64>,
}

impl ReluNetwork {
    pub fn new(layers: Vec<AffineLayer>, output: AffineLayer) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Architecture("network needs at least one hidden layer".into()));
        }
        let mut dims = vec![layers[0].in_dim()];
        for (k, layer) in layers.iter().enumerate() {
            if layer.in_dim() != *dims.last().unwrap() {
                return Err(Error::Shape(format!(
                    "layer {} expects input of width {}, previous width is {}",
                    k + 1,
                    layer.in_dim(),
                    dims.last().unwrap()
                )));
            }
            dims.push(layer.out_dim());
        }
        if output.in_dim() != *dims.last().unwrap() || output.out_dim() != 1 {
            return Err(Error::Shape(format!(
                "final map must be 1 x {}, got {} x {}",
                dims.last().unwrap(),
                output.out_dim(),
                output.in_dim()
            )));
        }
        dims.push(1);
        let arch = Architecture::new(dims)?;
        Ok(ReluNetwork { layers, output, arch })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn input_dim(&self) -> usize {
        self.arch.input_dim()
    }

    pub fn total_neurons(&self) -> usize {
        self.arch.total_neurons()
    }

    pub fn layers(&self) -> &[AffineLayer] {
        &self.layers
    }

    pub fn output_layer(&self) -> &AffineLayer {
        &self.output
    }

    /// Same hidden layers, final map multiplied by -1.
    pub fn negated(&self) -> ReluNetwork {
        ReluNetwork {
            layers: self.layers.clone(),
            output: AffineLayer {
                weights: -&self.output.weights,
                bias: -&self.output.bias,
            },
            arch: self.arch.clone(),
        }
    }

    pub fn with_output(&self, output: AffineLayer) -> Result<ReluNetwork> {
        ReluNetwork::new(self.layers.clone(), output)
    }

    /// `(layer, neuron)`, both 1-based, of a flat neuron index.
    pub fn neuron_of(&self, flat: usize) -> (usize, usize) {
        let mut rest = flat;
        for (i, &width) in self.arch.hidden().iter().enumerate() {
            if rest < width {
                return (i + 1, rest + 1);
            }
            rest -= width;
        }
        panic!("neuron index {flat} out of range");
    }

    /// Flat index of neuron `(layer, neuron)` (1-based).
    pub fn flat_index(&self, layer: usize, neuron: usize) -> Result<usize> {
        let hidden = self.arch.hidden();
        if layer == 0 || layer > hidden.len() || neuron == 0 || neuron > hidden[layer - 1] {
            return Err(Error::IndexOutOfRange(format!(
                "neuron ({layer}, {neuron}) in architecture {}",
                self.arch
            )));
        }
        Ok(hidden[..layer - 1].iter().sum::<usize>() + neuron - 1)
    }

    fn check_point(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "point has dimension {}, network input dimension is {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(DVector::from_column_slice(x))
    }

    /// Pre-activations of every hidden layer at `x`.
    pub fn preactivations(&self, x: &[f64]) -> Result<Vec<DVector<f64>>> {
        let mut h = self.check_point(x)?;
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let z = layer.apply(&h);
            h = z.map(|v| v.max(0.0));
            out.push(z);
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let pre = self.preactivations(x)?;
        let h = pre.last().unwrap().map(|v| v.max(0.0));
        Ok(self.output.apply(&h)[0])
    }

    /// Pre-activation of neuron `(layer, neuron)`, 1-based.
    pub fn node_map(&self, layer: usize, neuron: usize, x: &[f64]) -> Result<f64> {
        self.flat_index(layer, neuron)?;
        let pre = self.preactivations(x)?;
        Ok(pre[layer - 1][neuron - 1])
    }

    /// Scale used to normalise node values before comparing against the
    /// sign tolerance: the infinity norm of the neuron's affine row.
    pub fn node_scale(&self, flat: usize) -> f64 {
        let (i, j) = self.neuron_of(flat);
        let layer = &self.layers[i - 1];
        let row_max = layer.weights.row(j - 1).iter().fold(0.0f64, |m, w| m.max(w.abs()));
        row_max.max(layer.bias[j - 1].abs())
    }

    pub fn sign_sequence_at(&self, x: &[f64], tol: f64) -> Result<SignSequence> {
        let pre = self.preactivations(x)?;
        let mut entries = Vec::with_capacity(self.total_neurons());
        for z in &pre {
            for &value in z.iter() {
                let flat = entries.len();
                let scale = self.node_scale(flat);
                let normalized = if scale > 0.0 { value / scale } else { value };
                entries.push(Sign::from_value(normalized, tol));
            }
        }
        Ok(SignSequence::new(entries))
    }

    /// Affine restriction of every layer map to the cell named by `cell`.
    pub fn cell_affine_form(&self, cell: &SignSequence) -> Result<CellAffineForm> {
        if cell.len() != self.total_neurons() {
            return Err(Error::Shape(format!(
                "sign sequence has length {}, network has {} neurons",
                cell.len(),
                self.total_neurons()
            )));
        }
        let n0 = self.input_dim();
        let mut jac = DMatrix::<f64>::identity(n0, n0);
        let mut bias = DVector::<f64>::zeros(n0);
        let mut form = CellAffineForm {
            cell: cell.clone(),
            preact_jacobians: Vec::with_capacity(self.layers.len()),
            preact_biases: Vec::with_capacity(self.layers.len()),
            jacobians: Vec::with_capacity(self.layers.len()),
            biases: Vec::with_capacity(self.layers.len()),
            gradient: DVector::zeros(n0),
            offset: 0.0,
        };
        let mut flat = 0;
        for layer in &self.layers {
            let pj = &layer.weights * &jac;
            let pb = &layer.weights * &bias + &layer.bias;
            let mut post_j = pj.clone();
            let mut post_b = pb.clone();
            for r in 0..layer.out_dim() {
                if cell.get(flat + r) != Sign::Pos {
                    post_j.row_mut(r).fill(0.0);
                    post_b[r] = 0.0;
                }
            }
            flat += layer.out_dim();
            form.preact_jacobians.push(pj);
            form.preact_biases.push(pb);
            jac = post_j.clone();
            bias = post_b.clone();
            form.jacobians.push(post_j);
            form.biases.push(post_b);
        }
        form.gradient = (&self.output.weights * &jac).row(0).transpose();
        form.offset = (&self.output.weights * &bias)[0] + self.output.bias[0];
        Ok(form)
    }

    /// Node-map rows for the neurons fixed by `prefix` and for the whole
    /// layer that follows them. Neurons inside `prefix` mask later layers
    /// exactly as in [`ReluNetwork::cell_affine_form`].
    pub(crate) fn prefix_forms(&self, prefix: &[Sign]) -> PrefixForms {
        let n0 = self.input_dim();
        let mut jac = DMatrix::<f64>::identity(n0, n0);
        let mut bias = DVector::<f64>::zeros(n0);
        let mut rows = Vec::new();
        let mut offsets = Vec::new();
        let mut flat = 0;
        for layer in &self.layers {
            let pj = &layer.weights * &jac;
            let pb = &layer.weights * &bias + &layer.bias;
            for r in 0..layer.out_dim() {
                rows.push(pj.row(r).transpose());
                offsets.push(pb[r]);
            }
            if flat + layer.out_dim() > prefix.len() {
                break;
            }
            let mut post_j = pj;
            let mut post_b = pb;
            for r in 0..layer.out_dim() {
                if prefix[flat + r] != Sign::Pos {
                    post_j.row_mut(r).fill(0.0);
                    post_b[r] = 0.0;
                }
            }
            flat += layer.out_dim();
            jac = post_j;
            bias = post_b;
        }
        PrefixForms { rows, offsets }
    }

    /// Weights and biases i.i.d. `scale * N(0, 1)`, deterministic per seed.
    pub fn random(arch: &Architecture, seed: u64, scale: f64) -> Result<ReluNetwork> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Shape(format!("scale must be positive, got {scale}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sample = |rows: usize, cols: usize| -> AffineLayer {
            let weights = DMatrix::from_fn(rows, cols, |_, _| {
                scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
            });
            let bias = DVector::from_fn(rows, |_, _| {
                scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
            });
            AffineLayer { weights, bias }
        };
        let dims = arch.dims();
        let layers: Vec<AffineLayer> = dims
            .windows(2)
            .take(dims.len() - 2)
            .map(|w| sample(w[1], w[0]))
            .collect();
        let output = sample(1, dims[dims.len() - 2]);
        ReluNetwork::new(layers, output)
    }

    pub fn from_json(text: &str) -> Result<ReluNetwork> {
        let file: NetworkFile =
            serde_json::from_str(text).map_err(|e| Error::Shape(format!("invalid weight file: {e}")))?;
        file.into_network()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NetworkFile::from_network(self)).expect("serializable")
    }
}

/// On-disk weight file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub dims: Vec<usize>,
    pub layers: Vec<LayerFile>,
    #[serde(rename = "final")]
    pub output: LayerFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerFile {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LayerFile {
    fn from_layer(layer: &AffineLayer) -> Self {
        LayerFile {
            weights: layer
                .weights
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            bias: layer.bias.iter().copied().collect(),
        }
    }
}

impl NetworkFile {
    pub fn from_network(net: &ReluNetwork) -> Self {
        NetworkFile {
            dims: net.arch.dims().to_vec(),
            layers: net.layers.iter().map(LayerFile::from_layer).collect(),
            output: LayerFile::from_layer(&net.output),
        }
    }

    pub fn into_network(self) -> Result<ReluNetwork> {
        let arch = Architecture::new(self.dims.clone())?;
        if self.layers.len() != arch.dims().len() - 2 {
            return Err(Error::Shape(format!(
                "dims {:?} call for {} hidden layers, file has {}",
                self.dims,
                arch.dims().len() - 2,
                self.layers.len()
            )));
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        for (k, layer) in self.layers.iter().enumerate() {
            let (rows, cols) = (arch.dims()[k + 1], arch.dims()[k]);
            check_layer_shape(layer, rows, cols, &format!("layer {}", k + 1))?;
            layers.push(AffineLayer::from_rows(&layer.weights, &layer.bias)?);
        }
        let last = arch.dims()[arch.dims().len() - 2];
        check_layer_shape(&self.output, 1, last, "final")?;
        let output = AffineLayer::from_rows(&self.output.weights, &self.output.bias)?;
        let all_finite = layers
            .iter()
            .chain(std::iter::once(&output))
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()));
        if !all_finite {
            return Err(Error::Shape("weights must be finite".into()));
        }
        ReluNetwork::new(layers, output)
    }
}

fn check_layer_shape(layer: &LayerFile, rows: usize, cols: usize, name: &str) -> Result<()> {
    if layer.weights.len() != rows
        || layer.weights.iter().any(|r| r.len() != cols)
        || layer.bias.len() != rows
    {
        return Err(Error::Shape(format!(
            "{name}: expected {rows} x {cols} weights and {rows} biases"
        )));
    }
    Ok(())
}

/// Built-in example networks.
pub mod fixtures {
    use super::*;

    /// `F(x, y) = ReLU(x) + 2 ReLU(y) + 4 ReLU(1 - x - y)`.
    pub fn net_b() -> ReluNetwork {
        let layer = AffineLayer::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            &[0.0, 0.0, 1.0],
        )
        .unwrap();
        let output = AffineLayer::from_rows(&[vec![1.0, 2.0, 4.0]], &[0.0]).unwrap();
        ReluNetwork::new(vec![layer], output).unwrap()
    }

    pub fn by_name(name: &str) -> Option<ReluNetwork> {
        match name {
            "net-b" => Some(net_b()),
            "net-b-negated" => Some(net_b().negated()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::net_b;
    use super::*;
    use approx::assert_relative_eq;

    fn ss(s: &str) -> SignSequence {
        s.parse().unwrap()
    }

    // F(x, y) written out by hand for the fixture.
    fn net_b_by_hand(x: f64, y: f64) -> f64 {
        x.max(0.0) + 2.0 * y.max(0.0) + 4.0 * (1.0 - x - y).max(0.0)
    }

    #[test]
    fn evaluate_matches_hand_formula() {
        let net = net_b();
        assert_eq!(net.evaluate(&[0.0, 0.0]).unwrap(), 4.0);
        assert_eq!(net.evaluate(&[1.0, 0.0]).unwrap(), 1.0);
        for &(x, y) in &[(0.3, -2.0), (-1.5, 0.25), (2.0, 3.0), (0.1, 0.1)] {
            assert_relative_eq!(net.evaluate(&[x, y]).unwrap(), net_b_by_hand(x, y));
        }
        assert!(matches!(net.evaluate(&[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_output_weights_give_constant() {
        let net = ReluNetwork::random(&Architecture::new(vec![2, 3, 1]).unwrap(), 4, 1.0).unwrap();
        let net = net
            .with_output(AffineLayer::from_rows(&[vec![0.0; 3]], &[0.75]).unwrap())
            .unwrap();
        for x in [[0.0, 0.0], [5.0, -3.0], [-1.0, 9.0]] {
            assert_eq!(net.evaluate(&x).unwrap(), 0.75);
        }
    }

    #[test]
    fn node_maps() {
        let net = net_b();
        assert_eq!(net.node_map(1, 3, &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(net.node_map(1, 1, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(net.node_map(1, 3, &[0.25, 0.75]).unwrap(), 0.0);
        assert!(matches!(net.node_map(2, 1, &[0.0, 0.0]), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(net.node_map(1, 4, &[0.0, 0.0]), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn sign_sequences_at_points() {
        let net = net_b();
        assert_eq!(net.sign_sequence_at(&[0.5, 0.2], 1e-9).unwrap(), ss("+++"));
        assert_eq!(net.sign_sequence_at(&[1.0, 0.0], 1e-9).unwrap(), ss("+00"));
        assert_eq!(net.sign_sequence_at(&[0.0, 0.0], 1e-9).unwrap(), ss("00+"));
    }

    #[test]
    fn cell_gradients() {
        let net = net_b();
        let form = net.cell_affine_form(&ss("+++")).unwrap();
        assert_eq!(form.gradient.as_slice(), &[-3.0, -2.0]);
        assert_eq!(form.offset, 4.0);
        let form = net.cell_affine_form(&ss("+-0")).unwrap();
        assert_eq!(form.gradient.as_slice(), &[1.0, 0.0]);
        let form = net.cell_affine_form(&ss("---")).unwrap();
        assert_eq!(form.gradient.as_slice(), &[0.0, 0.0]);
        assert!(net.cell_affine_form(&ss("++")).is_err());
    }

    #[test]
    fn gradient_is_output_weights_times_masked_jacobian() {
        let arch = Architecture::new(vec![3, 4, 3, 1]).unwrap();
        let net = ReluNetwork::random(&arch, 11, 1.0).unwrap();
        let cell = ss("+-++-+0");
        let form = net.cell_affine_form(&cell).unwrap();
        let expected = (&net.output_layer().weights * form.jacobians.last().unwrap()).transpose();
        for (a, b) in form.gradient.iter().zip(expected.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        // masked rows are zero
        assert!(form.jacobians[0].row(1).iter().all(|&v| v == 0.0));
        assert!(form.jacobians[1].row(2).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let arch = Architecture::new(vec![2, 3, 1]).unwrap();
        let a = ReluNetwork::random(&arch, 7, 1.0).unwrap();
        let b = ReluNetwork::random(&arch, 7, 1.0).unwrap();
        let c = ReluNetwork::random(&arch, 8, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(ReluNetwork::random(&arch, 7, 0.0).is_err());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let net = net_b();
        let text = net.to_json();
        assert_eq!(ReluNetwork::from_json(&text).unwrap(), net);
        let bad = r#"{"dims":[2,3,1],"layers":[{"weights":[[1,0],[0,1]],"bias":[0,0]}],"final":{"weights":[[1,2,4]],"bias":[0]}}"#;
        assert!(matches!(ReluNetwork::from_json(bad), Err(Error::Shape(_))));
        assert!(ReluNetwork::from_json("{not json").is_err());
    }

    #[test]
    fn flat_indexing() {
        let net =
            ReluNetwork::random(&Architecture::new(vec![2, 3, 2, 1]).unwrap(), 1, 1.0).unwrap();
        assert_eq!(net.flat_index(2, 1).unwrap(), 3);
        assert_eq!(net.neuron_of(4), (2, 2));
        assert_eq!(net.neuron_of(0), (1, 1));
    }

    #[test]
    fn prefix_forms_match_full_form() {
        let arch = Architecture::new(vec![2, 3, 2, 1]).unwrap();
        let net = ReluNetwork::random(&arch, 5, 1.0).unwrap();
        let cell = ss("+0-+-");
        let full = net.cell_affine_form(&cell).unwrap();
        let prefix = net.prefix_forms(&cell.entries()[..3]);
        assert_eq!(prefix.rows.len(), 5);
        for r in 0..2 {
            let expected = full.preact_jacobians[1].row(r).transpose();
            assert_relative_eq!(prefix.rows[3 + r], expected, epsilon = 1e-12);
            assert_relative_eq!(prefix.offsets[3 + r], full.preact_biases[1][r], epsilon = 1e-12);
        }
    }
}
