// Generated by tests/oracles/generate.py; do not edit.
#![allow(clippy::excessive_precision)]

pub const F_X: [f64; 5] = [0.0, 0.25, 0.5, 0.8, 1.0];
pub const F_M1: [f64; 5] = [0.27154031740762189, 0.16304819227820893, 0.12762596520638079, 0.17875085096196022, 0.27154031740762189];
pub const F_M3: [f64; 5] = [0.00069444548828237193, 0.00012376576657198228, 2.1701389398575339e-5, 0.00018208896062088538, 0.00069444548828237193];
pub const F_M5: [f64; 5] = [1.3778659612013497e-7, 7.7593789109063316e-9, 2.6911444554673761e-10, 1.479473721340625e-8, 1.3778659612013497e-7];
pub const DOUBLE_INTEGRAL: [f64; 3] = [0.17520119364380146, 0.000198412859003145, 2.5052108385461292e-8];
pub const WEIGHTS_M1_N5: [f64; 6] = [0.099667994624955817, 0.19933598924991163, 0.19933598924991163, 0.19933598924991163, 0.19933598924991163, 0.099667994624955817];
pub const MULTIPLIERS_M1_N5: [f64; 1] = [5.4476072157423965e-62];
pub const WEIGHTS_M3_N5: [f64; 6] = [0.071787721397577229, 0.24292365053442421, 0.18527422308316553, 0.18523859291443596, 0.2429737966993072, 0.07180202469153221];
pub const MULTIPLIERS_M3_N5: [f64; 3] = [-1.3158351176632948e-5, 8.4411076478083375e-6, -6.9867469575242499e-6];
pub const NORM_SQ_M3_N5: [f64; 1] = [1.3369964951509049e-8];
pub const WEIGHTS_M3_N10: [f64; 11] = [0.035599051315271214, 0.12319937513117466, 0.087253101221399397, 0.10576075501834564, 0.097151554504617605, 0.10206974427947455, 0.097151319386011732, 0.10576140094511034, 0.087251589834903223, 0.12320215309734581, 0.035599955324655477];
pub const MULTIPLIERS_M3_N10: [f64; 3] = [-8.0090042334933605e-7, 4.9256680836786031e-7, -4.2272208702075441e-7];
pub const WEIGHTS_M5_N10: [f64; 11] = [0.031429047973911134, 0.14102247424389709, 0.054386181831256337, 0.14289204182017753, 0.063536994909002284, 0.13346650738084845, 0.063536997048799092, 0.14289203757850062, 0.054386186630516518, 0.14102248268917103, 0.031429047893919697];
pub const MULTIPLIERS_M5_N10: [f64; 5] = [-1.8727644871858873e-9, 4.7816363519068465e-10, 1.3252579350534515e-9, -2.2607745574894245e-9, -5.7000487822266712e-10];
pub const NORM_SQ_M5_N10: [f64; 1] = [9.1450008188936055e-16];
pub const WEIGHTS_M7_N8: [f64; 9] = [0.036196721492202374, 0.19719871482201332, 0.0039843921053599511, 0.29679312028022526, -0.068345897673189537, 0.29679312022968223, 0.003984392401591065, 0.19719871485022592, 0.036196721491889414];
pub const MULTIPLIERS_M7_N8: [f64; 7] = [-3.3985987997752482e-11, -1.2989333454437121e-11, 2.1928635725082886e-11, 2.502511384393686e-11, -5.2148928973633048e-11, -2.6323649344948309e-11, -6.7057052919457085e-12];
pub const NORM_SQ_M1_N1: [f64; 1] = [0.075765685479980483];
