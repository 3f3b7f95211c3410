#include <stdio.h>
int process(int b, int count)
{
    while (count != 0) {
        int a = count;
        count = b % count;
        b = a;
    }
    return b;
}
int measure(int b, int count)
{
    int t = process(b, count);
    return b / t * count;
}
int main(void)
{
    int b = 69;
    int count = 31;
    printf("%d %d\n", process(b, count), measure(b, count));
    return 0;
}
