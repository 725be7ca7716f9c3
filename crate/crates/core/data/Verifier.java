import java.util.Random;

/**
 * Nondeterministic value source for benchmark inputs. Verifiers model each
 * call as an unconstrained value of the returned type.
 */
public final class Verifier {
    private static final Random RANDOM = new Random();

    private Verifier() {
    }

    public static boolean nondetBoolean() {
        return RANDOM.nextBoolean();
    }

    public static byte nondetByte() {
        return (byte) RANDOM.nextInt();
    }

    public static char nondetChar() {
        return (char) RANDOM.nextInt();
    }

    public static short nondetShort() {
        return (short) RANDOM.nextInt();
    }

    public static int nondetInt() {
        return RANDOM.nextInt();
    }

    public static long nondetLong() {
        return RANDOM.nextLong();
    }

    public static float nondetFloat() {
        return RANDOM.nextFloat();
    }

    public static double nondetDouble() {
        return RANDOM.nextDouble();
    }
}
