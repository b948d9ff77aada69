use descentlab::harness::data::{load_mnist, mnist_dataset, Labels};
use descentlab::harness::idx::{encode_idx, load_idx, parse_idx, write_idx, IdxTensor};
use descentlab::Error;
use proptest::prelude::*;

fn write_fake_mnist(dir: &std::path::Path, n_train: usize, n_test: usize) {
    for (prefix, n) in [("train", n_train), ("t10k", n_test)] {
        let images = IdxTensor::new(vec![n, 4, 4], (0..n * 16).map(|i| (i % 256) as u8).collect()).unwrap();
        let labels = IdxTensor::new(vec![n], (0..n).map(|i| (i % 10) as u8).collect()).unwrap();
        write_idx(dir.join(format!("{prefix}-images-idx3-ubyte")), &images).unwrap();
        write_idx(dir.join(format!("{prefix}-labels-idx1-ubyte")), &labels).unwrap();
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.idx");
    let t = IdxTensor::new(vec![3], vec![7, 2, 1]).unwrap();
    write_idx(&path, &t).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), [0, 0, 8, 1, 0, 0, 0, 3, 7, 2, 1]);
    assert_eq!(load_idx(&path).unwrap(), t);
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(load_idx("/nonexistent/idx"), Err(Error::Io(_))));
}

#[test]
fn mnist_loading_and_stratification() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_mnist(dir.path()).unwrap().is_none());
    write_fake_mnist(dir.path(), 200, 50);
    let (train, test) = load_mnist(dir.path()).unwrap().unwrap();
    assert_eq!(train.images.shape(), (200, 16));
    assert!(train.images.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
    assert_eq!(train.images.get(0, 15), 15.0 / 255.0);
    let data = mnist_dataset(&train, &test, 40, 20, 3).unwrap();
    let Labels::Classes { classes, n_classes } = &data.labels else { panic!("class labels expected") };
    assert_eq!(*n_classes, 10);
    for c in 0..10 {
        assert_eq!(data.train.iter().filter(|&&i| classes[i] == c).count(), 4);
        assert_eq!(data.test.iter().filter(|&&i| classes[i] == c).count(), 2);
    }
    let tt = data.train_test().unwrap();
    assert_eq!(tt.y_train.shape(), (40, 10));
}

#[test]
fn corrupt_mnist_is_format_error() {
    let dir = tempfile::tempdir().unwrap();
    write_fake_mnist(dir.path(), 20, 10);
    let path = dir.path().join("t10k-labels-idx1-ubyte");
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.pop();
    std::fs::write(&path, bytes).unwrap();
    assert!(matches!(load_mnist(dir.path()), Err(Error::Format(_))));
}

proptest! {
    #[test]
    fn encode_parse_identity(n in 0usize..6, h in 1usize..5, w in 1usize..5, seed in any::<u8>()) {
        let images = IdxTensor::new(vec![n, h, w], (0..n * h * w).map(|i| (i as u8).wrapping_mul(seed)).collect()).unwrap();
        prop_assert_eq!(parse_idx(&encode_idx(&images)).unwrap(), images);
        let labels = IdxTensor::new(vec![n], (0..n).map(|i| i as u8 ^ seed).collect()).unwrap();
        prop_assert_eq!(parse_idx(&encode_idx(&labels)).unwrap(), labels);
    }

    #[test]
    fn truncation_always_detected(n in 1usize..6, cut in 1usize..16) {
        let t = IdxTensor::new(vec![n, 2, 2], vec![1; n * 4]).unwrap();
        let bytes = encode_idx(&t);
        let cut = cut.min(n * 4);
        prop_assert!(matches!(parse_idx(&bytes[..bytes.len() - cut]), Err(Error::Format(_))));
    }
}
