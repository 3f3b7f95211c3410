#include <stdio.h>
int calc(int z, int acc)
{
    while (acc != 0) {
        int num = acc;
        acc = z % acc;
        z = num;
    }
    return z;
}
int walk(int z, int acc)
{
    int sum = calc(z, acc);
    return z / sum * acc;
}
int main(void)
{
    int z = 105;
    int acc = 119;
    printf("%d %d\n", calc(z, acc), walk(z, acc));
    return 0;
}
