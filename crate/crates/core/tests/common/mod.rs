//! Oracle values and helpers shared by the integration tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct CliRun {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// Run the `kasner` binary with `args` in `dir`.
pub fn kasner(dir: &Path, args: &[&str]) -> CliRun {
    let out = Command::new(env!("CARGO_BIN_EXE_kasner")).args(args).current_dir(dir).output().expect("kasner binary runs");
    CliRun {
        code: out.status.code().expect("exited normally"),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// mpmath `loggamma` at 40 digits: (re z, im z, re ln Γ, im ln Γ).
pub const LOG_GAMMA_ORACLE: [[f64; 4]; 100] = [
    [-2.009185, 24.993566, -46.42100872845967, 51.38567635338509],
    [13.673106, 16.755026, 12.890407298758513, 46.42105573109408],
    [0.995632, -19.375938, -28.0476455607878, -38.82930991038947],
    [21.547995, 0.997106, 43.97450236128805, 3.038454084313705],
    [27.482432, 7.224347, 61.89130058432059, 23.890471517934845],
    [-1.769045, 0.415856, 0.0839737278077235, -6.708904678322849],
    [17.254846, 14.110458, 26.00372788842682, 41.17299008238188],
    [1.810505, 14.577859, -18.466899838414204, 26.486116995674426],
    [7.147035, 17.349537, -7.210787006536084, 41.35787343409727],
    [13.979431, -17.15632, 13.468142766574179, -47.93055595238006],
    [27.385041, 7.31651, 61.542828845168486, 24.171569703147963],
    [-4.439866, 21.109529, -47.348988189952735, 34.9382390246209],
    [25.969312, -7.71735, 56.752434393337, -25.1001499378638],
    [25.476609, -11.080253, 53.931284673724385, -35.99999165123447],
    [17.892421, -22.270608, 21.423134567438055, -67.93290278716817],
    [3.213756, -10.247975, -8.833352188805437, -17.51121512249226],
    [26.964407, -17.632703, 55.6432965377464, -58.92214127344965],
    [-0.775128, -1.63346, -2.3709233797213543, 3.2756682720414605],
    [29.6301, 2.317259, 69.91540249965307, 7.815821370032329],
    [9.923111, -21.399314, -3.5410853322103817, -56.94549853506463],
    [7.589754, 1.55809, 7.540078796024465, 3.0653465040725796],
    [4.886575, -9.224204, -3.670745574868119, -17.157633734098987],
    [21.215229, 6.794239, 41.89200801402509, 20.711115607768413],
    [17.798061, 18.791425, 24.13450554717026, 56.40055927765573],
    [17.11673, -0.77994, 30.981234212620485, -2.192354742885013],
    [5.281143, -9.620545, -3.1869437898049395, -18.529671514719855],
    [-8.1442, -22.704878, -61.937718090115204, -33.0083424151877],
    [18.119385, 8.142047, 32.02817957463087, 23.63332752619682],
    [3.54125, -1.562806, 0.8640402055069106, -1.8076966173468474],
    [27.949105, 22.101506, 56.26597362487481, 75.23699832842873],
    [-3.139322, 12.81865, -28.546997431190263, 13.65694268248492],
    [-5.860998, 14.019719, -38.10400592037481, 11.612272295962336],
    [10.298004, -5.966035, 11.760549759799867, -13.95107934564325],
    [19.186251, 2.782791, 36.73343811884723, 8.157965108355349],
    [22.006838, 16.406824, 39.64200067806801, 51.714634243444934],
    [1.998967, 10.805297, -12.482131413837145, 17.166419598898145],
    [-0.885478, 0.122632, 1.8307496382027282, -3.8724456859222554],
    [3.243924, -3.041002, -0.507326106502012, -3.5501986243863275],
    [21.125552, -3.685683, 42.387719357783595, -11.174612465360287],
    [29.316562, -15.770974, 64.82978740205527, -53.73123652389045],
    [4.368699, -19.934956, -18.794209978013328, -45.425779503079376],
    [-8.912383, 2.247738, -17.562885338231528, -24.50837881553499],
    [11.348918, -3.013386, 15.517709607426548, -7.222980202489279],
    [2.282515, -23.787193, -30.795309326744277, -54.332911326563625],
    [-4.597809, 3.092579, -11.108643648396457, -10.802619845042852],
    [-0.58649, -12.744658, -21.866598582697616, -17.942262944559474],
    [22.559036, 7.249026, 45.93220654726936, 22.55348242425118],
    [6.714105, 9.84601, 0.03388295619017138, 20.58863664228466],
    [12.734117, -19.530875, 7.318970607501521, -54.11985825557749],
    [24.785754, 0.774, 54.088020912913784, 2.469160398138636],
    [4.06355, -0.453141, 1.8436032407152179, -0.5784919569527033],
    [6.091383, 3.141607, 4.104753284609728, 5.562226670545043],
    [-5.363309, -4.959871, -17.265956605215603, 9.148626182200658],
    [14.343297, 8.877659, 20.773007065693857, 23.875433159295053],
    [-4.046348, 9.278243, -23.95143050177896, 3.1797906033918815],
    [20.752655, 17.654341, 34.65722369338424, 54.96580954533784],
    [1.512914, -6.075343, -6.7931129965915105, -6.399735730919513],
    [-1.165556, 22.34287, -39.352623110475115, 44.38900095581327],
    [2.70269, 16.235809, -18.438452644859755, 32.33048502279569],
    [23.545211, -22.113462, 40.785610273282195, -72.10877502562283],
    [14.199579, 3.33659, 22.670893449942326, 8.766188945285439],
    [0.917234, 2.388933, -2.471188714327611, 0.3276782931303662],
    [9.855093, 9.456452, 8.293764384840006, 22.416115702818164],
    [17.508192, 6.880485, 30.74863056962549, 19.677158128002986],
    [1.47041, -21.612992, -30.048074647844675, -46.31456251974996],
    [17.81443, -7.869651, 31.2438630373354, -22.697172709764192],
    [13.126347, -10.60873, 16.267183329241202, -27.950570697630383],
    [7.293747, 0.298212, 7.129372051744355, 0.5717383775329764],
    [-1.752398, -10.254519, -20.44877320322318, -9.835516686635367],
    [-6.826438, 0.710326, -8.531406433041022, -21.590145984733486],
    [1.337277, 15.457286, -21.06851434181707, 28.161221661764944],
    [14.399145, 17.405738, 14.541688239704486, 49.08010356905545],
    [28.799485, 4.097633, 66.92313298909879, 13.71218415476244],
    [26.441288, -11.868815, 56.809334604622755, -39.03391343919828],
    [25.690546, -1.87653, 56.93342753031949, -6.0564206158217155],
    [9.656297, -18.535506, -1.1160193177731468, -47.789351297294296],
    [-4.773236, -9.042423, -25.166670887155025, -1.1280897088560569],
    [21.532532, -24.100266, 32.206516972727165, -77.36266408294064],
    [27.247399, -19.879159, 55.2500382884007, -66.9199868611861],
    [2.799971, 10.245412, -9.804713423867762, 16.954547272040806],
    [18.549717, 22.088096, 23.78610895823083, 67.91157066942196],
    [26.948731, 9.968452, 59.25751220436094, 32.875852133029646],
    [-8.380001, -14.60979, -46.33719664412254, -8.069465133277452],
    [-3.764537, -19.55735, -42.51452039941102, -31.435503369914727],
    [6.53524, -24.893963, -18.72564803520481, -63.88793247688773],
    [4.716421, -18.107707, -15.27541245171664, -40.47708911247063],
    [18.030002, 2.841793, 33.36169231678912, 8.151375480864953],
    [16.901272, 17.418853, 22.38476714839201, 51.261001003775114],
    [-5.189915, -8.691306, -25.39732526756015, 0.5803507246189157],
    [-0.565391, -16.058037, -27.263324655647004, -26.816192624430784],
    [25.339027, 0.919163, 55.85452356412175, 2.953005668990464],
    [-2.872313, -3.939554, -10.23142685324824, 5.133978729972023],
    [25.163285, -19.932261, 47.95904958903675, -65.73132478868229],
    [-6.38881, 18.588282, -48.56308518785544, 23.668837371066147],
    [29.910735, 18.382273, 65.53627828988968, 63.235629126465],
    [-1.938815, -15.991027, -30.96917131504229, -24.32294960293041],
    [24.315058, 14.924905, 48.19341337970293, 48.196930728242926],
    [-7.373045, 14.095526, -42.427841753936754, 8.737849101548205],
    [1.670136, 2.885241, -2.347799825353148, 1.7912940307077532],
    [5.671923, -0.199785, 4.233865068025994, -0.3286540350070804],
];
